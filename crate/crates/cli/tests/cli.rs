//! End-to-end checks of the `gwhf` binary: artifact routing, exit codes,
//! and byte-level determinism of repeated runs.

use std::path::Path;
use std::process::{Command, Output};

fn gwhf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwhf"))
        .args(args)
        .output()
        .expect("the gwhf binary should spawn")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn chaos_reports_stream_to_stdout() {
    let out = gwhf(&["chaos", "--kernel", "laguerre:1", "--emit-g", "--emit-table"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let report = stdout_of(&out);
    assert!(report.contains("\"radial_integral\": \"7/81\""));
    assert!(report.contains("\"non_hyperuniform\": true"));
    assert!(report.contains("\"coefficients\""));
    assert!(report.contains("\"weight\": \"exp(-2 s)\""));
}

#[test]
fn the_gauss_chaos_request_exits_as_a_config_error() {
    let out = gwhf(&["chaos", "--kernel", "gauss"]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr_of(&out);
    assert!(message.starts_with("gwhf: configuration error"), "{message}");
    assert!(message.contains("charged theory"), "{message}");
}

#[test]
fn descending_radius_ranges_exit_as_a_config_error() {
    let out = gwhf(&["varscan", "--kernel", "gauss", "--radii", "12:4:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("invalid radii"));
}

#[test]
fn unknown_subcommands_use_the_usage_exit_code() {
    let out = gwhf(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_lists_stream_as_csv() {
    let out = gwhf(&["zeros", "--half-width", "3", "--step", "0.1", "--seed", "5"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let csv = stdout_of(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config {"));
    assert_eq!(lines[1], "re,im,charge,jacobian,residual,label");
    assert!(lines.len() > 2, "no zeros found in a disk of radius 2");
    for row in &lines[2..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6, "malformed row {row}");
        let charge: i32 = fields[2].parse().expect("integer charge");
        assert_eq!(charge.abs(), 1);
    }
}

#[test]
fn kernel_validation_reports_admissibility() {
    let out = gwhf(&["validate-kernel", "--kernel", "gauss", "--radius", "4", "--step", "0.25"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("\"admissible\": true"));
}

#[test]
fn stft_noise_runs_report_the_uncharged_family() {
    let out = gwhf(&[
        "spectrogram",
        "--window",
        "hermite1",
        "--radii",
        "1.5,2",
        "--realizations",
        "2",
        "--seed",
        "3",
        "--step",
        "0.1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let report = stdout_of(&out);
    assert!(report.contains("\"mode\": \"uncharged\""));
    assert!(!report.contains("\"mode\": \"charged\""));
}

fn varscan_into(prefix: &Path) -> Output {
    gwhf(&[
        "varscan",
        "--kernel",
        "gauss",
        "--radii",
        "1.5,2",
        "--realizations",
        "3",
        "--seed",
        "9",
        "--step",
        "0.1",
        "--out",
        prefix.to_str().unwrap(),
    ])
}

#[test]
fn artifact_prefixes_collect_the_full_trio() {
    let dir = tempfile::tempdir().unwrap();
    let out = varscan_into(&dir.path().join("run"));
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let json = std::fs::read_to_string(dir.path().join("run.json")).unwrap();
    assert!(json.contains("\"command\": \"varscan\""));
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.contains("radius,mean,var,iod,ci_lo,ci_hi,n_realizations,mode"));
    let svg = std::fs::read_to_string(dir.path().join("run.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    assert!(varscan_into(&dir.path().join("a")).status.success());
    assert!(varscan_into(&dir.path().join("b")).status.success());
    for ext in ["json", "csv", "svg"] {
        let a = std::fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} artifacts differ between identical runs");
    }
}
