//! Report serialization. The JSON output mirrors the CSV fields one to one.

use serde::Serialize;
use std::io::Write;

use stray::synth::{LabeledDataset, NullExperimentResult, TimingCell};
use stray::threshold::SpacingDiagnostics;
use stray::{AnomalyReport, StrayConfig};

use crate::io::CliError;
use crate::FprArgs;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct DetectRow {
    row_id: usize,
    score: f64,
    gap_index: usize,
    flag: bool,
}

#[derive(Serialize)]
struct DetectJson<'a> {
    threshold: Option<f64>,
    k: usize,
    alpha: f64,
    method: &'a str,
    rows: Vec<DetectRow>,
}

fn detect_rows(report: &AnomalyReport<f64>) -> Vec<DetectRow> {
    (0..report.scores.len())
        .map(|i| DetectRow {
            row_id: i,
            score: report.scores[i],
            gap_index: report.gap_index[i],
            flag: report.flags[i],
        })
        .collect()
}

fn threshold_text(threshold: Option<f64>) -> String {
    match threshold {
        Some(t) => t.to_string(),
        None => "none".to_string(),
    }
}

pub fn write_detect_report(
    out: &mut dyn Write,
    report: &AnomalyReport<f64>,
    config: &StrayConfig<f64>,
    method: &str,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(
                out,
                "# threshold={} k={} alpha={} method={}",
                threshold_text(report.threshold),
                config.k,
                config.alpha,
                method
            )?;
            writeln!(out, "row_id,score,gap_index,flag")?;
            for row in detect_rows(report) {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.row_id, row.score, row.gap_index, row.flag
                )?;
            }
        }
        Format::Json => {
            let doc = DetectJson {
                threshold: report.threshold,
                k: config.k,
                alpha: config.alpha,
                method,
                rows: detect_rows(report),
            };
            serde_json::to_writer(&mut *out, &doc).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct WindowJson {
    window: usize,
    start: usize,
    end: usize,
    threshold: Option<f64>,
    rows: Vec<DetectRow>,
}

/// One window's report; `row_id`s are global observation indices.
pub fn write_window_report(
    out: &mut dyn Write,
    report: &AnomalyReport<f64>,
    window: usize,
    start: usize,
    end: usize,
    format: Format,
) -> Result<(), CliError> {
    let mut rows = detect_rows(report);
    for row in &mut rows {
        row.row_id += start;
    }
    match format {
        Format::Csv => {
            writeln!(
                out,
                "# window={window} start={start} end={end} threshold={}",
                threshold_text(report.threshold)
            )?;
            writeln!(out, "row_id,score,gap_index,flag")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.row_id, row.score, row.gap_index, row.flag
                )?;
            }
        }
        Format::Json => {
            let doc = WindowJson {
                window,
                start,
                end,
                threshold: report.threshold,
                rows,
            };
            serde_json::to_writer(&mut *out, &doc).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ScenarioJson<'a> {
    scenario: &'a str,
    seed: u64,
    n: usize,
    d: usize,
    planted: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

pub fn write_scenario(
    out: &mut dyn Write,
    labeled: &LabeledDataset<f64>,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let header: Vec<String> = (0..labeled.data.n_cols())
                .map(|c| format!("col_{c}"))
                .collect();
            writeln!(out, "{}", header.join(","))?;
            for row in labeled.data.rows() {
                let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Format::Json => {
            let doc = ScenarioJson {
                scenario: labeled.scenario.name(),
                seed: labeled.seed,
                n: labeled.data.n_rows(),
                d: labeled.data.n_cols(),
                planted: labeled.planted.iter().copied().collect(),
                rows: labeled.data.rows().map(|r| r.to_vec()).collect(),
            };
            serde_json::to_writer(&mut *out, &doc).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_labels(out: &mut dyn Write, labeled: &LabeledDataset<f64>) -> Result<(), CliError> {
    writeln!(out, "row_id,is_planted")?;
    for row in 0..labeled.data.n_rows() {
        writeln!(out, "{},{}", row, labeled.planted.contains(&row))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FprJson<'a> {
    method: &'a str,
    n: usize,
    d: usize,
    iters: usize,
    alpha: f64,
    k: usize,
    seed: u64,
    mean_fpr: f64,
    std_error: f64,
}

pub fn write_fpr(
    out: &mut dyn Write,
    args: &FprArgs,
    result: &NullExperimentResult,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "method,n,d,iters,alpha,k,seed,mean_fpr,std_error")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                args.method.name(),
                args.n,
                args.d,
                result.iterations,
                args.alpha,
                args.k,
                args.seed,
                result.mean_fpr,
                result.std_error
            )?;
        }
        Format::Json => {
            let doc = FprJson {
                method: args.method.name(),
                n: args.n,
                d: args.d,
                iters: result.iterations,
                alpha: args.alpha,
                k: args.k,
                seed: args.seed,
                mean_fpr: result.mean_fpr,
                std_error: result.std_error,
            };
            serde_json::to_writer(&mut *out, &doc).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BenchRow<'a> {
    method: &'a str,
    n: usize,
    d: usize,
    seconds: f64,
}

pub fn write_bench(
    out: &mut dyn Write,
    cells: &[TimingCell],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "method,n,d,seconds")?;
            for cell in cells {
                writeln!(
                    out,
                    "{},{},{},{}",
                    cell.method.name(),
                    cell.n,
                    cell.d,
                    cell.seconds
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<BenchRow> = cells
                .iter()
                .map(|c| BenchRow {
                    method: c.method.name(),
                    n: c.n,
                    d: c.d,
                    seconds: c.seconds,
                })
                .collect();
            serde_json::to_writer(&mut *out, &rows).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpacingsJson {
    order_stats: Vec<f64>,
    spacings: Vec<f64>,
    standardized: Vec<f64>,
}

pub fn write_spacings(
    out: &mut dyn Write,
    diagnostics: &SpacingDiagnostics<f64>,
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "i,order_stat,spacing,standardized")?;
            for i in 0..diagnostics.order_stats.len() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    i + 1,
                    diagnostics.order_stats[i],
                    diagnostics.spacings[i],
                    diagnostics.standardized[i]
                )?;
            }
        }
        Format::Json => {
            let doc = SpacingsJson {
                order_stats: diagnostics.order_stats.clone(),
                spacings: diagnostics.spacings.clone(),
                standardized: diagnostics.standardized.clone(),
            };
            serde_json::to_writer(&mut *out, &doc).map_err(CliError::data)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
