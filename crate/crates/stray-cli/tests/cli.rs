//! End-to-end tests of the `stray` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stray"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("stray-cli-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn scenario_detect_roundtrip_matches_the_library() {
    let data_path = tmp_path("c.csv");
    let labels_path = tmp_path("c-labels.csv");
    let out = run(&[
        "scenario",
        "--name",
        "c",
        "--seed",
        "1",
        "--output",
        data_path.to_str().unwrap(),
        "--labels",
        labels_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let detect_out = run(&[
        "detect",
        "--k",
        "10",
        "--alpha",
        "0.01",
        "--method",
        "brute",
        data_path.to_str().unwrap(),
    ]);
    assert!(detect_out.status.success());
    let text = stdout_str(&detect_out);
    let flagged: Vec<usize> = text
        .lines()
        .skip(2)
        .filter(|l| l.ends_with(",true"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();

    // The labels file pins the planted rows; CSV in, flags out, the same
    // rows as calling the library directly.
    let labeled = stray::synth::scenario::<f64>(stray::synth::Scenario::C, 1);
    let report = stray::detect(&labeled.data, &stray::StrayConfig::default()).unwrap();
    assert_eq!(flagged, report.flagged_rows());
    let planted: Vec<usize> = labeled.planted.iter().copied().collect();
    assert_eq!(flagged, planted);
    assert_eq!(flagged.len(), 5);

    let labels = std::fs::read_to_string(&labels_path).unwrap();
    for row in &planted {
        assert!(labels.contains(&format!("{row},true")));
    }

    std::fs::remove_file(&data_path).ok();
    std::fs::remove_file(&labels_path).ok();
}

#[test]
fn scenario_output_is_deterministic() {
    let a = run(&["scenario", "--name", "b", "--seed", "7"]);
    let b = run(&["scenario", "--name", "b", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let c = run(&["scenario", "--name", "b", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn non_numeric_cell_is_a_data_error_naming_the_cell() {
    let out = run_with_stdin(&["detect", "--k", "2"], "1.0,2.0\n3.0,oops\n4.0,5.0\n");
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("column 2"), "stderr: {err}");
    assert!(err.contains("oops"), "stderr: {err}");
}

#[test]
fn ragged_rows_are_a_data_error() {
    let out = run_with_stdin(&["detect", "--k", "2"], "1.0,2.0\n3.0\n");
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("ragged"), "stderr: {err}");
}

#[test]
fn unknown_flags_and_bad_values_are_usage_errors() {
    let out = run(&["detect", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_with_stdin(&["detect", "--alpha", "1.5"], "1.0\n2.0\n");
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["scenario", "--name", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fail_on_anomaly_exits_one() {
    let data_path = tmp_path("fig3.csv");
    let out = run(&[
        "scenario",
        "--name",
        "fig3_single",
        "--seed",
        "3",
        "--output",
        data_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "detect",
        "--fail-on-anomaly",
        data_path.to_str().unwrap(),
        "--output",
        tmp_path("fig3-report.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&data_path).ok();
    std::fs::remove_file(tmp_path("fig3-report.csv")).ok();
}

#[test]
fn stream_emits_one_report_per_window_with_global_ids() {
    // 24 observations, window 12, step 6: windows at 0, 6 and 12.
    let mut input = String::new();
    for i in 0..24 {
        let x = f64::from(i % 5) * 0.1;
        input.push_str(&format!("{x},{}\n", 0.05 * f64::from(i % 7)));
    }
    let out = run_with_stdin(
        &["stream", "--window", "12", "--step", "6", "--k", "3"],
        &input,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8(out.stderr).unwrap());
    let text = stdout_str(&out);
    let headers: Vec<&str> = text.lines().filter(|l| l.starts_with("# window=")).collect();
    assert_eq!(headers.len(), 3);
    assert!(headers[0].contains("window=0 start=0 end=12"));
    assert!(headers[1].contains("window=1 start=6 end=18"));
    assert!(headers[2].contains("window=2 start=12 end=24"));
    // Global row ids: the last window covers rows 12..24.
    let last_block: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("window=2"))
        .filter(|l| !l.starts_with('#') && !l.starts_with("row_id") && !l.is_empty())
        .collect();
    assert_eq!(last_block.len(), 12);
    assert!(last_block[0].starts_with("12,"));
    assert!(last_block[11].starts_with("23,"));
}

#[test]
fn stream_shorter_than_window_is_a_data_error() {
    let out = run_with_stdin(&["stream", "--window", "12", "--k", "3"], "1.0\n2.0\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_detect_output_mirrors_csv_fields() {
    let input = "0.0\n0.1\n0.05\n0.2\n0.15\n0.12\n0.08\n0.03\n0.18\n0.11\n9.0\n";
    let out = run_with_stdin(&["detect", "--k", "3", "--format", "json"], input);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["k"], 3);
    assert_eq!(doc["method"], "brute");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 11);
    assert_eq!(doc["rows"][10]["flag"], true);
    assert!(doc["threshold"].as_f64().is_some());
}

#[test]
fn header_rows_are_auto_detected() {
    let with_header = "x,y\n0.0,0.0\n0.1,0.0\n0.0,0.1\n0.1,0.1\n0.05,0.05\n0.2,0.0\n0.0,0.2\n0.15,0.1\n0.1,0.15\n0.05,0.1\n5.0,5.0\n";
    let out = run_with_stdin(&["detect", "--k", "3"], with_header);
    assert!(out.status.success());
    let text = stdout_str(&out);
    // 11 data rows plus comment and header lines.
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().last().unwrap().starts_with("10,"));
}

#[test]
fn fpr_subcommand_reports_a_rate() {
    let out = run(&[
        "fpr", "--n", "60", "--d", "1", "--iters", "5", "--k", "5", "--method", "stray_brute",
        "--seed", "11", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let fpr = doc["mean_fpr"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&fpr));
    assert_eq!(doc["iters"], 5);

    // Same seed, same rate.
    let again = run(&[
        "fpr", "--n", "60", "--d", "1", "--iters", "5", "--k", "5", "--method", "stray_brute",
        "--seed", "11", "--format", "json",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn bench_subcommand_times_every_cell() {
    let out = run(&[
        "bench",
        "--n-values",
        "100,200",
        "--d-values",
        "2",
        "--methods",
        "stray_brute,stray_kdtree",
        "--k",
        "5",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let seconds: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(seconds > 0.0);
    }
}

#[test]
fn spacings_simulate_standardizes_by_rank() {
    let out = run(&[
        "spacings", "--simulate", "5000", "--kmax", "4", "--seed", "9",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "i,order_stat,spacing,standardized");
    let mut prev_stat = f64::INFINITY;
    for (i, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>().unwrap())
            .collect();
        assert_eq!(fields[0] as usize, i + 1);
        assert!(fields[1] < prev_stat);
        prev_stat = fields[1];
        assert!((fields[3] - (i + 1) as f64 * fields[2]).abs() < 1e-12);
    }
}

#[test]
fn spacings_reads_a_single_column_sample() {
    let out = run_with_stdin(
        &["spacings", "--kmax", "2"],
        "1.0\n2.0\n4.0\n8.0\n",
    );
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "1,8,4,4");
    assert_eq!(lines[2], "2,4,2,4");

    let out = run_with_stdin(&["spacings", "--kmax", "2"], "1.0,2.0\n3.0,4.0\n");
    assert_eq!(out.status.code(), Some(3));
}
