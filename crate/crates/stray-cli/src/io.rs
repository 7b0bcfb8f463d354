//! CSV ingestion and stream handling.
//!
//! Dialect: comma-separated, decimal point, UTF-8. An optional single
//! header row is auto-detected: if any field of the first row fails to
//! parse as a number, the row is treated as a header. Every malformed cell
//! is reported with its line and column.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Read, Write};
use std::path::Path;

use stray::{detect, DataMatrix, StrayConfig};

use crate::output::{self, Format};

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;

/// Error carrying the process exit code it should produce.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: err.to_string(),
        }
    }

    pub fn usage_msg(message: String) -> Self {
        Self {
            code: EXIT_USAGE,
            message,
        }
    }

    pub fn data(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_DATA,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        // A closed downstream pipe is not an error worth reporting.
        if err.kind() == io::ErrorKind::BrokenPipe {
            return CliError {
                code: 0,
                message: String::new(),
            };
        }
        CliError::data(format!("i/o error: {err}"))
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let file = File::open(p)
                .map_err(|e| CliError::data(format!("cannot open {}: {e}", p.display())))?;
            Ok(Box::new(file))
        }
        _ => Ok(Box::new(io::stdin())),
    }
}

pub fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::data(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn looks_like_header(record: &csv::StringRecord) -> bool {
    record.iter().any(|f| f.trim().parse::<f64>().is_err())
}

fn parse_record(
    record: &csv::StringRecord,
    expected_cols: usize,
    line: u64,
) -> Result<Vec<f64>, CliError> {
    if record.len() != expected_cols {
        return Err(CliError::data(format!(
            "line {line}: ragged row: expected {expected_cols} columns, found {}",
            record.len()
        )));
    }
    record
        .iter()
        .enumerate()
        .map(|(col, field)| {
            field.trim().parse::<f64>().map_err(|_| {
                CliError::data(format!(
                    "line {line}, column {}: non-numeric cell `{field}`",
                    col + 1
                ))
            })
        })
        .collect()
}

/// Reads a numeric CSV matrix from a file or standard input.
pub fn read_matrix(path: Option<&Path>) -> Result<DataMatrix<f64>, CliError> {
    let input = open_input(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected_cols = 0usize;
    for (i, result) in reader.records().enumerate() {
        let record = result.map_err(|e| CliError::data(format!("csv error: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rows.is_empty() && expected_cols == 0 {
            if looks_like_header(&record) {
                expected_cols = record.len();
                continue;
            }
            expected_cols = record.len();
        }
        rows.push(parse_record(&record, expected_cols, line)?);
    }
    if rows.is_empty() {
        return Err(CliError::data("empty input: no data rows".to_string()));
    }
    DataMatrix::from_rows(rows).map_err(CliError::data)
}

/// Reads a single-column numeric CSV sample.
pub fn read_column(path: Option<&Path>) -> Result<Vec<f64>, CliError> {
    let data = read_matrix(path)?;
    if data.n_cols() != 1 {
        return Err(CliError::data(format!(
            "expected a single-column sample, found {} columns",
            data.n_cols()
        )));
    }
    Ok(data.as_slice().to_vec())
}

/// Reads newline-delimited numeric rows from standard input and runs the
/// detector over sliding windows, emitting each window's report as soon as
/// its last observation arrives. At end of input a final window flush with
/// the stream end is emitted if the stride did not already land there.
/// Returns whether any window flagged a row.
pub fn stream_windows(
    config: &StrayConfig<f64>,
    width: usize,
    step: usize,
    format: Format,
) -> Result<bool, CliError> {
    let stdin = io::stdin();
    let mut out: Box<dyn Write> = Box::new(BufWriter::new(io::stdout()));

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected_cols = 0usize;
    let mut header_skipped = false;
    let mut next_start = 0usize;
    let mut window_index = 0usize;
    let mut last_emitted_start: Option<usize> = None;
    let mut any_flagged = false;

    for (line_no, line) in stdin.lock().lines().enumerate() {
        let line = line?;
        let line_id = line_no as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = csv::StringRecord::from(line.split(',').collect::<Vec<_>>());
        if rows.is_empty() && !header_skipped {
            header_skipped = true;
            if looks_like_header(&record) {
                continue;
            }
            expected_cols = record.len();
        }
        rows.push(parse_record(&record, expected_cols, line_id)?);

        while rows.len() >= next_start + width {
            emit_window(
                &mut out, config, &rows, next_start, width, window_index, format,
                &mut any_flagged,
            )?;
            last_emitted_start = Some(next_start);
            window_index += 1;
            next_start += step;
        }
    }

    if rows.len() < width {
        return Err(CliError::data(format!(
            "stream of length {} shorter than window width {width}",
            rows.len()
        )));
    }
    let flush_start = rows.len() - width;
    if last_emitted_start != Some(flush_start) {
        emit_window(
            &mut out,
            config,
            &rows,
            flush_start,
            width,
            window_index,
            format,
            &mut any_flagged,
        )?;
    }
    out.flush()?;
    Ok(any_flagged)
}

#[allow(clippy::too_many_arguments)]
fn emit_window(
    out: &mut Box<dyn Write>,
    config: &StrayConfig<f64>,
    rows: &[Vec<f64>],
    start: usize,
    width: usize,
    window_index: usize,
    format: Format,
    any_flagged: &mut bool,
) -> Result<(), CliError> {
    let slice = rows[start..start + width].to_vec();
    let data = DataMatrix::from_rows(slice).map_err(CliError::data)?;
    let report = detect(&data, config)
        .map_err(|e| CliError::data(format!("window {window_index}: {e}")))?;
    *any_flagged |= report.n_anomalies() > 0;
    output::write_window_report(out, &report, window_index, start, start + width, format)?;
    out.flush()?;
    Ok(())
}
