//! End-to-end tests: CSV ingestion, normalization, report reproducibility,
//! exit codes, and the documented command examples, exercised through both
//! the library surface and the compiled binary.

use asymlab::ingest::{ingest_csv, normalize_minmax, write_pairs_csv};
use asymlab::report::{from_json, to_canonical_json};
use asymlab_core::experiments::{sample_case, STUDY_DENSITY_CONFIG};
use asymlab_core::gem::{sample_npgem, NpgemConfig};
use asymlab_core::inference::{cross_fit, PairedSample};
use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_asymlab"));
    c.env_remove("ASYMLAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be valid JSON")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path.display().to_string()
}

fn lognormal_fixture(dir: &Path, n: usize, seed: u64) -> String {
    let sample = sample_case("lognormal_normal", n, seed).unwrap();
    let path = dir.join("lognormal.csv");
    write_pairs_csv(&path, &sample).unwrap();
    path.display().to_string()
}

#[test]
fn headerless_two_column_file_of_ten_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..10).map(|i| format!("{}.5,{}\n", i, i * 2)).collect();
    let path = write_file(dir.path(), "plain.csv", &rows);
    let result = ingest_csv(Path::new(&path), None, None).unwrap();
    assert_eq!(result.sample.n_total, 10);
    assert!(result.warnings.is_empty());
    assert_eq!(result.sample.x[0], 0.5);
    assert_eq!(result.sample.y[9], 18.0);
}

#[test]
fn na_row_is_dropped_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows: String = (0..10).map(|i| format!("{i},{i}\n")).collect();
    rows.insert_str(rows.len() / 2, "NA,3.0\n");
    let path = write_file(dir.path(), "na.csv", &rows);
    let result = ingest_csv(Path::new(&path), None, None).unwrap();
    assert_eq!(result.sample.n_total, 10);
    assert_eq!(result.warnings.len(), 1);
    assert!(result.warnings[0].contains("1 row dropped"), "{:?}", result.warnings);
}

#[test]
fn write_then_ingest_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample_case("lognormal_normal", 100, 42).unwrap();
    let path = dir.path().join("roundtrip.csv");
    write_pairs_csv(&path, &sample).unwrap();
    let back = ingest_csv(&path, None, None).unwrap();
    assert_eq!(back.sample.x, sample.x);
    assert_eq!(back.sample.y, sample.y);
}

#[test]
fn named_columns_resolve_through_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::from("id,exposure,response\n");
    for i in 0..12 {
        rows.push_str(&format!("{i},{},{}\n", i as f64 + 0.25, 2 * i));
    }
    let path = write_file(dir.path(), "named.csv", &rows);
    let result = ingest_csv(Path::new(&path), Some("exposure"), Some("response")).unwrap();
    assert_eq!(result.sample.n_total, 12);
    assert_eq!(result.sample.x[0], 0.25);
    assert_eq!(result.sample.y[1], 2.0);
    // Positional selection of the same columns agrees.
    let by_index = ingest_csv(Path::new(&path), Some("1"), Some("2")).unwrap();
    assert_eq!(by_index.sample.x, result.sample.x);
}

#[test]
fn minmax_maps_two_four_onto_unit_interval() {
    let x: Vec<f64> = vec![2.0, 3.0, 4.0, 2.5, 3.5, 2.25, 3.75, 2.5];
    let y: Vec<f64> = vec![0.0, 1.0, 0.5, 0.25, 0.75, 0.125, 0.875, 0.375];
    let sample = PairedSample::new(x, y).unwrap();
    let (normalized, record) = normalize_minmax(&sample).unwrap();
    assert_eq!(record.x_min, 2.0);
    assert_eq!(record.x_range, 2.0);
    assert_eq!(normalized.x, vec![0.0, 0.5, 1.0, 0.25, 0.75, 0.125, 0.875, 0.25]);
    // Already-[0,1] coordinate: identity map, unit scale.
    assert_eq!(record.y_range, 1.0);
    assert_eq!(normalized.y, sample.y);
}

#[test]
fn normalization_shifts_c_hat_by_the_log_range_ratio() {
    // H(aX) = H(X) + ln a, so mapping each coordinate onto [0,1] changes
    // Ĉ by ln(range_y) − ln(range_x). Checked empirically at n = 2000.
    let sample = sample_case("lognormal_normal", 2000, 7).unwrap();
    let (normalized, record) = normalize_minmax(&sample).unwrap();
    let raw = cross_fit(&sample, 0.05, &STUDY_DENSITY_CONFIG).unwrap();
    let scaled = cross_fit(&normalized, 0.05, &STUDY_DENSITY_CONFIG).unwrap();
    let expected = record.y_range.ln() - record.x_range.ln();
    assert_eq!(record.c_shift, expected);
    assert!(
        (scaled.c_hat - raw.c_hat - expected).abs() < 0.05,
        "shift {} vs expected {}",
        scaled.c_hat - raw.c_hat,
        expected
    );
}

#[test]
fn estimate_recovers_the_lognormal_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 1000, 11);
    let out = run(&["estimate", "--input", &path, "--seed", "1"]);
    let report = stdout_json(&out);
    let c_hat = report["payload"]["result"]["c_hat"].as_f64().unwrap();
    assert!((4.7..=5.3).contains(&c_hat), "c_hat = {c_hat}");
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["config"]["command"], "estimate");
}

#[test]
fn expanding_test_on_a_contracting_fixture_is_not_supported() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample_npgem(&NpgemConfig {
        g_id: "square".into(),
        noise_variance: 0.0,
        noise_exposure_correlation: 0.0,
        n: 1000,
        seed: 5,
    })
    .unwrap();
    let path = dir.path().join("square.csv");
    write_pairs_csv(&path, &sample).unwrap();
    let out = run(&[
        "test",
        "--input",
        &path.display().to_string(),
        "--dynamics",
        "expanding",
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["payload"]["decision"]["decision"], "DirectionNotSupported");
    assert!(report["payload"]["result"]["c_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes_distinguish_input_config_and_numeric_failures() {
    // 2: unreadable input file.
    let out = run(&["estimate", "--input", "/nonexistent/input.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("input error"));

    // 3: invalid flag value.
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 100, 3);
    let out = run(&["estimate", "--input", &path, "--alpha", "0.7"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["estimate", "--input", &path, "--grid", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["test", "--input", &path]);
    assert_eq!(out.status.code(), Some(3), "test without --dynamics");

    // 4: numeric failure (rank-deficient spline design: x takes only two
    // distinct values, so the 10-knot basis collapses).
    let mut rows = String::new();
    for i in 0..40 {
        rows.push_str(&format!("{},{}\n", (i % 2) as f64, i as f64 / 40.0));
    }
    let degenerate = write_file(dir.path(), "degenerate.csv", &rows);
    let out = run(&["diagnose", "--input", &degenerate, "--bootstrap", "200"]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn env_seed_is_used_only_when_the_flag_is_absent() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 200, 9);
    let from_env = bin()
        .args(["estimate", "--input", &path])
        .env("ASYMLAB_SEED", "77")
        .output()
        .unwrap();
    let report = stdout_json(&from_env);
    assert_eq!(report["config"]["seed"], 77);

    let flag_wins = bin()
        .args(["estimate", "--input", &path, "--seed", "12"])
        .env("ASYMLAB_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&flag_wins)["config"]["seed"], 12);

    let bad_env = bin()
        .args(["estimate", "--input", &path])
        .env("ASYMLAB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(3));
}

#[test]
fn repeated_runs_emit_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 400, 13);
    for args in [
        vec!["estimate", "--input", path.as_str(), "--seed", "4"],
        vec![
            "simulate", "--table", "1", "--g", "cbrt", "--replicates", "5", "--n", "300",
            "--seed", "4",
        ],
        vec![
            "density", "--input", path.as_str(), "--x-col", "1", "--grid", "1024",
            "--format", "csv",
        ],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success(), "{:?}", args);
        assert_eq!(first.stdout, second.stdout, "non-reproducible output for {args:?}");
    }
}

#[test]
fn parallel_replicates_match_serial_summaries() {
    let serial = run(&[
        "simulate", "--table", "3", "--g", "sqrt", "--replicates", "8", "--n", "300",
        "--seed", "2", "--jobs", "1",
    ]);
    let parallel = run(&[
        "simulate", "--table", "3", "--g", "sqrt", "--replicates", "8", "--n", "300",
        "--seed", "2", "--jobs", "4",
    ]);
    let a = stdout_json(&serial);
    let b = stdout_json(&parallel);
    assert_eq!(a["payload"], b["payload"]);
}

#[test]
fn json_reports_round_trip_through_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 200, 21);
    let out = run(&["estimate", "--input", &path, "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = from_json(text.trim_end()).unwrap();
    let re_rendered = to_canonical_json(&report).unwrap();
    assert_eq!(re_rendered, text.trim_end(), "round trip changed the report bytes");
}

#[test]
fn density_csv_has_two_columns_and_grid_length_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 300, 17);
    let out = run(&[
        "density", "--input", &path, "--x-col", "1", "--grid", "512", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,density");
    assert_eq!(lines.len(), 513);
    let total: f64 = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    // Riemann mass of the clipped estimate stays near 1.
    let first_x: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    let second_x: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
    let integral = total * (second_x - first_x);
    assert!((integral - 1.0).abs() < 0.05, "integral = {integral}");
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = lognormal_fixture(dir.path(), 200, 31);
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "estimate", "--input", &path, "--seed", "6", "--out",
        &out_path.display().to_string(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report = from_json(&text).unwrap();
    assert_eq!(report.config.seed, 6);
}
