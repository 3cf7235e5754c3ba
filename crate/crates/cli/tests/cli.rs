use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sdwt::config::RunConfig;
use sdwt::io;
use sdwt::signals::GaussianPacket;
use sdwt::SampledField;
use serde_json::Value;
use tempfile::TempDir;

const SMALL: &[&str] = &[
    "grid.alpha_count=16",
    "grid.x_count=32",
    "sampling.n_mu=2",
    "sampling.n_phi=2",
    "sampling.n_a=2",
    "sampling.negative_a=false",
    "sampling.kappa_stride=8",
    "sampling.b_stride=16",
];

fn small_config() -> RunConfig {
    RunConfig::default().with_overrides(SMALL).unwrap()
}

fn sdwt(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("config.json");
    if !cfg.exists() {
        fs::write(&cfg, small_config().to_json()).unwrap();
    }
    Command::new(env!("CARGO_BIN_EXE_sdwt"))
        .current_dir(dir)
        .arg("--config")
        .arg(&cfg)
        .args(args)
        .output()
        .unwrap()
}

fn signal(dir: &Path, name: &str, field: &SampledField) -> String {
    let path = dir.join(name);
    fs::write(&path, io::write_field(field)).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&out.stderr)))
}

fn transform(dir: &Path, field: &SampledField, out: &str) -> String {
    let input = signal(dir, "signal.csv", field);
    let o = sdwt(dir, &["--out", out, "transform", "--input", &input]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(dir.join(out).join("coefficients.csv")).unwrap()
}

#[test]
fn zero_signal_gives_zero_coefficients() {
    let dir = TempDir::new().unwrap();
    let grid = small_config().grid.build().unwrap();
    let text = transform(dir.path(), &SampledField::zeros(grid), "zero");
    let (field, _) = io::read_coefficients(&text).unwrap();
    assert!(!field.values.is_empty());
    assert!(field.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn gaussian_transform_has_one_row_per_parameter_point_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config();
    let field = GaussianPacket::default().sample(cfg.grid.build().unwrap());
    let first = transform(dir.path(), &field, "a");
    let second = transform(dir.path(), &field, "b");
    assert_eq!(first, second);
    let rows = first.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, cfg.parameter_sampling().unwrap().len());
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["points"], rows);
}

#[test]
fn transform_without_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = sdwt(dir.path(), &["transform"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "Usage");
}

#[test]
fn kernel_suite_passes() {
    let dir = TempDir::new().unwrap();
    let o = sdwt(dir.path(), &["--out", "v", "verify", "--suite", "kernel"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v/report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(dir.path().join("v/timings.json").exists());
}

#[test]
fn sparse_parseval_fails_with_exit_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("config.json"), RunConfig::default().to_json()).unwrap();
    let o = sdwt(
        dir.path(),
        &[
            "--set",
            "sampling.n_mu=1",
            "--set",
            "sampling.n_phi=1",
            "--set",
            "sampling.n_a=2",
            "--out",
            "v",
            "verify",
            "--suite",
            "parseval",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v/report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    let ratio = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["check"] == "parseval/pair-0/ratio")
        .unwrap();
    assert_eq!(ratio["pass"], false);
    assert!(ratio["computed"].is_number());
}

#[test]
fn unknown_suite_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = sdwt(dir.path(), &["verify", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plotdata_slices_coefficients() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config();
    let field = GaussianPacket::default().sample(cfg.grid.build().unwrap());
    transform(dir.path(), &field, "t");
    let o = sdwt(
        dir.path(),
        &[
            "--out",
            "p",
            "plotdata",
            "--coefficients",
            "t/coefficients.csv",
            "--slice",
            "mu,phi",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("p/plot.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("mu,phi,abs_W,arg_W"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), cfg.sampling.n_mu * cfg.sampling.n_phi);
    assert!(rows.iter().all(|r| r.len() == 4 && r[2] >= 0.0));
}

#[test]
fn plotdata_on_empty_file_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let field = GaussianPacket::default().sample(small_config().grid.build().unwrap());
    let full = transform(dir.path(), &field, "t");
    let header: String = full.lines().take(2).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("empty.csv"), header).unwrap();
    let o = sdwt(
        dir.path(),
        &[
            "--out",
            "p",
            "plotdata",
            "--coefficients",
            "empty.csv",
            "--slice",
            "a,b",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(dir.path().join("p/plot.csv")).unwrap(),
        "a,b,abs_W,arg_W\n"
    );
}

#[test]
fn plotdata_rejects_bad_slice() {
    let dir = TempDir::new().unwrap();
    let field = GaussianPacket::default().sample(small_config().grid.build().unwrap());
    transform(dir.path(), &field, "t");
    let o = sdwt(
        dir.path(),
        &["plotdata", "--coefficients", "t/coefficients.csv", "--slice", "a,a"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "BadSlice");
}

#[test]
fn kernel_export() {
    let dir = TempDir::new().unwrap();
    let o = sdwt(dir.path(), &["--out", "k", "kernel"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let record: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("k/kernel.json")).unwrap()).unwrap();
    let m = &record["abcd"];
    let det = m["a"].as_f64().unwrap() * m["d"].as_f64().unwrap() - m["b"].as_f64().unwrap() * m["c"].as_f64().unwrap();
    assert!((det - 1.0).abs() < 1e-12);
    let rows = fs::read_to_string(dir.path().join("k/kernel.csv")).unwrap();
    let n = small_config().kernel.eta_count;
    assert_eq!(rows.lines().filter(|l| !l.starts_with('#')).count(), n * n + 1);
}

#[test]
fn fock_export_agrees_on_low_block() {
    let dir = TempDir::new().unwrap();
    let o = sdwt(dir.path(), &["--out", "f", "fock", "--mu", "0.2", "--a", "1.2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("f/fock_summary.json")).unwrap()).unwrap();
    assert!(summary["block_deviation_n_le_3"].as_f64().unwrap() < 1e-3);
    assert!(dir.path().join("f/u_quadrature.csv").exists());
    assert!(dir.path().join("f/u_normal_ordered.csv").exists());
}

#[test]
fn bad_config_exits_two_with_json_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("config.json"), "{\"grid\": {\"alpha_count\": 0}}").unwrap();
    let o = sdwt(dir.path(), &["kernel"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "Usage");

    fs::write(dir.path().join("config.json"), "{\"nope\": 1}").unwrap();
    assert_eq!(sdwt(dir.path(), &["kernel"]).status.code(), Some(2));
    assert_eq!(sdwt(dir.path(), &["--set", "seed=x", "kernel"]).status.code(), Some(2));
}

#[test]
fn threads_from_environment() {
    let dir = TempDir::new().unwrap();
    let base = sdwt(dir.path(), &["--out", "one", "kernel"]);
    assert!(base.status.success());
    let cfg = dir.path().join("config.json");
    let o = Command::new(env!("CARGO_BIN_EXE_sdwt"))
        .current_dir(dir.path())
        .env("SDWT_THREADS", "3")
        .args(["--config", cfg.to_str().unwrap(), "--out", "three", "kernel"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        fs::read(dir.path().join("one/kernel.csv")).unwrap(),
        fs::read(dir.path().join("three/kernel.csv")).unwrap()
    );
    let bad = Command::new(env!("CARGO_BIN_EXE_sdwt"))
        .current_dir(dir.path())
        .env("SDWT_THREADS", "many")
        .args(["--config", cfg.to_str().unwrap(), "kernel"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
