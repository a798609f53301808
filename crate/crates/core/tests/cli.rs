use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gradbound::bound::parse_samples_csv;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradbound")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();
    let ok = bin(&["check", "--config", &config("sqrt_linear_n3.cfg"), "--out", o]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("[7/12, 2/3)"));
    assert!(out_dir.join("check_report.txt").exists());
    assert!(out_dir.join("assumptions.csv").exists());

    let bad = bin(&["check", "--config", &config("sqrt_linear_n4.cfg"), "--out", o, "--quiet"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = std::fs::read_to_string(out_dir.join("check_report.txt")).unwrap();
    assert!(report.contains("beta window empty"), "{report}");
}

#[test]
fn config_errors_cite_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "[integrand]\nfamily = quadratic\n\n[structural]\nbeta = 1.2\n");
    let out = bin(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.cfg:5:"), "{err}");

    let missing = bin(&["check", "--config", dir.path().join("nope.cfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn mismatched_mode_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.cfg", "[integrand]\nfamily = quadratic\n[experiment]\nmode = lemmas\n");
    let out = bin(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweeps_are_deterministic_and_honor_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "q.cfg",
        "[integrand]\nfamily = quadratic\n[solver]\ncells = 8, 16, 32\ndatum = harmonic_quadratic\ninit_noise = 0.05\n\
         [experiment]\nrho = 0.2\nR = 0.4\n",
    );
    let mut csvs = Vec::new();
    for (k, workers) in ["1", "1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = bin(&[
            "sweep-mesh",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--workers",
            workers,
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join("sweep_mesh.svg").exists());
        csvs.push(std::fs::read_to_string(out_dir.join("sweep_mesh.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
    let samples = parse_samples_csv(&csvs[0]).unwrap();
    assert_eq!(samples.len(), 3);
    assert!(samples.iter().all(|s| s.ratio > 0.0 && s.clamp_upper.is_infinite()));
}

#[test]
fn solve_writes_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "[integrand]\nfamily = orlicz_log\ncoef.p = 1.5\n[solver]\ncells = 4, 8\ndatum = affine\ndatum.a = 0.5, -0.25\n",
    );
    let out_dir = dir.path().join("solve");
    let out = bin(&["solve", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let field = std::fs::read_to_string(out_dir.join("field.csv")).unwrap();
    assert_eq!(field.lines().count(), 1 + 9 * 9);
    assert!(out_dir.join("cell_gradients.csv").exists());
    assert!(out_dir.join("solve_report.txt").exists());
}
