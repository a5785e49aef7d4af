//! End-to-end tests of the `radiant` binary: exit codes, report artifacts,
//! and reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn radiant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radiant")).args(args).output().expect("spawn radiant")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "radiant-cli-{tag}-{}-{}",
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn malformed_config_exits_one_without_artifacts() {
    let dir = temp_dir("badcfg");
    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "space = \"euclid:3\"\nnot_a_field = 1\n").unwrap();
    let out_dir = dir.join("out");
    let out = radiant(&["classify", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!out_dir.join("report.json").exists(), "no report on config error");
}

#[test]
fn classify_bounded_exits_zero() {
    let out = radiant(&["classify", "--space", "euclid:3", "--psi", "sqrt", "--weight", "power:-3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).to_lowercase().contains("bounded"), "stdout: {}", stdout(&out));
}

#[test]
fn classify_large_exits_zero() {
    let out = radiant(&["classify", "--space", "dr:2,1", "--psi", "linear", "--weight", "constant"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).to_lowercase().contains("large"), "stdout: {}", stdout(&out));
}

#[test]
fn solve_ball_with_zero_source_returns_constant_profile() {
    let dir = temp_dir("ball");
    let out = radiant(&[
        "solve", "--mode", "ball", "--space", "euclid:3", "--psi", "sqrt", "--weight", "constant:0",
        "--r-max", "2", "--c", "1.5", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,u"));
    for line in lines {
        let u: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((u - 1.5).abs() <= 1e-12, "line: {line}");
    }
    assert!(dir.join("report.json").exists());
}

#[test]
fn solve_bounded_on_divergent_problem_exits_two() {
    let out = radiant(&[
        "solve", "--mode", "bounded", "--space", "dr:2,1", "--psi", "linear", "--weight", "constant",
        "--r-max", "4",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_ko_suite_passes() {
    let dir = temp_dir("ko");
    let out = radiant(&["verify", "--suite", "ko", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"ko\""), "report: {report}");
}

#[test]
fn verify_unknown_suite_exits_one() {
    let out = radiant(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_green_with_impossible_cap_exits_one() {
    let dir = temp_dir("cap");
    let cfg = dir.join("cap.toml");
    fs::write(&cfg, "green_ratio_cap = 1.0\nsuites = [\"green\"]\n").unwrap();
    let out = radiant(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_reports_are_reproducible_per_seed() {
    let dir_a = temp_dir("seed-a");
    let dir_b = temp_dir("seed-b");
    for dir in [&dir_a, &dir_b] {
        let out = radiant(&["verify", "--suite", "threeg", "--seed", "7", "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(dir_a.join("report.json")).unwrap();
    let b = fs::read(dir_b.join("report.json")).unwrap();
    assert_eq!(a, b, "same-seed reports must be byte-identical");
}
