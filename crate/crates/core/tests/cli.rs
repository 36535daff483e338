use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use spacelike::discretization::{build_grid, read_field, write_field, Domain, StarDomain2D};
use spacelike::verifier::{reports_from_json, VerificationReport};
use spacelike::ScalarField;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacelike"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cap_verification_passes_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--case",
        "hyperboloid",
        "--nr",
        "64",
        "--nphi",
        "128",
        "--out",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&report).unwrap();
    let reports: Vec<VerificationReport> = reports_from_json(&text).unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r.pass && r.residual_max <= r.tolerance));
    let again = serde_json::to_string_pretty(&reports).unwrap();
    assert_eq!(reports_from_json(&again).unwrap(), reports);
}

#[test]
fn failed_checks_exit_with_one() {
    let out = run(&[
        "verify",
        "--case",
        "hyperboloid",
        "--nr",
        "16",
        "--nphi",
        "32",
        "--discrete-tolerance",
        "1e-12",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("FAIL"));
    let reports = reports_from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(reports.iter().any(|r| !r.pass));
}

#[test]
fn timelike_field_is_an_input_error_naming_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("steep.txt");
    let grid = Arc::new(build_grid(&Domain::Star(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap()), 8, 16).unwrap());
    let field = ScalarField::from_fn(grid, |x| 2.0 * x[0]).unwrap();
    write_field(&field, &path).unwrap();
    let out = run(&["verify", "--case", "field", "--input", path_str(&path)]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains("not spacelike") && msg.contains("node (i ="), "{msg}");
}

#[test]
fn invalid_arguments_exit_with_two() {
    assert_eq!(code(&run(&["solve", "--k", "3", "--nr", "8", "--nphi", "16"])), 2);
    assert_eq!(code(&run(&["solve", "--hk", "-1", "--nr", "8", "--nphi", "16"])), 2);
    assert_eq!(code(&run(&["solve", "--domain", "ellipse", "--semi-b", "0"])), 2);
    assert_eq!(code(&run(&["verify", "--case", "field"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn iteration_limit_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = run(&[
        "solve",
        "--nr",
        "16",
        "--nphi",
        "32",
        "--max-iterations",
        "1",
        "--summary",
        path_str(&summary),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(doc["converged"], false);
}

#[test]
fn solve_writes_field_summary_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("u.txt");
    let summary = dir.path().join("summary.json");
    let report = dir.path().join("report.json");
    let out = run(&[
        "solve",
        "--nr",
        "64",
        "--nphi",
        "128",
        "--out",
        path_str(&field),
        "--summary",
        path_str(&summary),
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let u = read_field(&field).unwrap();
    assert!((u.center_value() - (1.0 - 2f64.sqrt())).abs() < 2e-3);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(doc["converged"], true);
    assert!(doc["angle"]["spread"].as_f64().unwrap() < 1e-3);
    let reports = reports_from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(reports.iter().all(|r| r.pass));

    // verifying the written field again gives the same reports
    let again = dir.path().join("again.json");
    let out = run(&[
        "verify",
        "--case",
        "field",
        "--input",
        path_str(&field),
        "--dirichlet",
        "0",
        "--out",
        path_str(&again),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        reports_from_json(&std::fs::read_to_string(&again).unwrap()).unwrap(),
        reports
    );
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec![
            "verify",
            "--case",
            "hyperboloid",
            "--nr",
            "64",
            "--nphi",
            "128",
            "--format",
            "csv",
        ],
        vec!["solve", "--nr", "12", "--nphi", "24"],
        vec!["radial-solve", "--n", "3", "--k", "2"],
        vec!["rigidity-scan", "--values", "1.0,1.2", "--nr", "12", "--nphi", "24"],
        vec!["convergence", "--sizes", "8x16,16x32,32x64"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn scan_csv_has_header_and_one_row_per_value() {
    let out = run(&["rigidity-scan", "--values", "1.0,1.3", "--nr", "12", "--nphi", "24"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("spread"));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], spacelike::solver::SCAN_HEADER);
    assert_eq!(lines.len(), 3);
}

#[test]
fn empty_report_sets_serialize_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("empty.json");
    let csv = dir.path().join("empty.csv");
    spacelike::cli::emit_report(&[], spacelike::cli::Format::Json, Some(&json)).unwrap();
    spacelike::cli::emit_report(&[], spacelike::cli::Format::Csv, Some(&csv)).unwrap();
    assert_eq!(std::fs::read_to_string(&json).unwrap().trim(), "[]");
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("check,"));
}

#[test]
fn unwritable_output_is_an_input_error() {
    let out = run(&["radial-solve", "--out", "/nonexistent-dir/profile.json"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("/nonexistent-dir/profile.json"));
}
