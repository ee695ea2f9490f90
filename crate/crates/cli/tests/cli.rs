use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn out_arg(dir: &TempDir) -> String {
    dir.path().to_str().unwrap().to_string()
}

#[test]
fn traveling_interval_passes_and_rewrites_identically() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir);
    let o = run(&["scenario", "traveling-interval", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read(dir.path().join("traveling-interval.json")).unwrap();
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["passed"], true);
    assert!(dir.path().join("traveling-interval.length.xy").exists());
    assert!(dir.path().join("summary.csv").exists());
    let o = run(&["scenario", "traveling-interval", "--out", &out]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("traveling-interval.json")).unwrap(), first);
}

#[test]
fn unknown_scenario_lists_names() {
    let o = run(&["scenario", "no-such-thing", "--out", &out_arg(&TempDir::new().unwrap())]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    for name in ["traveling-interval", "mollifier-union", "disk-dilation", "interval-selection"] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn shape_deriv_on_the_disk() {
    let dir = TempDir::new().unwrap();
    let poly = data("disk-256.json");
    let o = run(&[
        "shape-deriv",
        "--polygon",
        poly.to_str().unwrap(),
        "--field",
        "V(x)=x",
        "--functional",
        "volume",
        "--out",
        &out_arg(&dir),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read(dir.path(), "shape_deriv.json");
    let est = r["report"]["estimate"].as_f64().unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((est - two_pi).abs() < 0.01 * two_pi);
    let xy = fs::read_to_string(dir.path().join("shape_deriv.xy")).unwrap();
    assert_eq!(xy.lines().count(), 81);
}

#[test]
fn config_file_supplies_inputs_relative_to_itself() {
    let dir = TempDir::new().unwrap();
    let cfg = data("disk-dilation.config.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "shape-deriv", "--out", &out_arg(&dir), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("shape_deriv.json").exists());
    assert!(!dir.path().join("shape_deriv.csv").exists());
}

#[test]
fn fomin_gaussian_gap() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "fomin",
        "--measure",
        data("gaussian.json").to_str().unwrap(),
        "--set",
        data("unit-gap.json").to_str().unwrap(),
        "--direction",
        "1",
        "--out",
        &out_arg(&dir),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read(dir.path(), "fomin.json");
    let est = r["report"]["estimate"].as_f64().unwrap();
    assert!((est - 0.156_971_555_882_289_33).abs() < 1e-4);
    assert!(fs::read_to_string(dir.path().join("fomin.csv")).unwrap().starts_with("run,t,quotient"));
}

#[test]
fn select_and_anchor_errors() {
    let dir = TempDir::new().unwrap();
    let plot = data("sin-cos.json");
    let out = out_arg(&dir);
    let o = run(&["select", "--plot", plot.to_str().unwrap(), "--r0", "0.5", "--x0", "0.7", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("selection.csv")).unwrap();
    assert!(csv.starts_with("r0,x0,residual"));
    let o = run(&["select", "--plot", plot.to_str().unwrap(), "--r0", "0.5", "--x0", "5", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("anchor"), "{}", stderr(&o));
    let o = run(&["select", "--plot", plot.to_str().unwrap(), "--r0", "0.5", "--strategy", "weak", "--out", &out, "--grid", "13"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = read(dir.path(), "selection.json");
    assert_eq!(s["samples"].as_array().unwrap().len(), 13);
}

#[test]
fn lsc_reports_the_step_map() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "lsc",
        "--plot",
        data("step.json").to_str().unwrap(),
        "--opens",
        data("opens.json").to_str().unwrap(),
        "--out",
        &out_arg(&dir),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let r = read(dir.path(), "lsc.json");
    let v = r["report"]["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["r"][0].as_f64(), Some(0.0));
    let o = run(&[
        "lsc",
        "--plot",
        data("sin-cos.json").to_str().unwrap(),
        "--opens",
        data("opens.json").to_str().unwrap(),
        "--out",
        &out_arg(&dir),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn svdiff_clusters() {
    let dir = TempDir::new().unwrap();
    let o = run(&["svdiff", "--problem", data("multideriv.json").to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read(dir.path(), "svdiff.json");
    let values: Vec<f64> = r["report"]["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["value"].as_f64().unwrap())
        .collect();
    assert_eq!(values, vec![-1.0, 0.0, 1.0]);
    let o = run(&[
        "svdiff",
        "--problem",
        data("multideriv.json").to_str().unwrap(),
        "--functional",
        "abs(x)^0.5",
        "--out",
        &out_arg(&dir),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn parse_errors_name_path_and_position() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vertices\": [[0, 0], [1, 0],\n  [1 1]]}").unwrap();
    let o = run(&["shape-deriv", "--polygon", bad.to_str().unwrap(), "--out", &out_arg(&dir)]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("bad.json:2:"), "{msg}");

    let o = run(&["svdiff", "--problem", data("multideriv.json").to_str().unwrap(), "--functional", "x +* y"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error at"), "{}", stderr(&o));
}

#[test]
fn validation_errors_name_the_precondition() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir);
    let o = run(&["scenario", "traveling-interval", "--grid", "80", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("odd"), "{}", stderr(&o));
    let o = run(&["scenario", "multideriv-family", "--schedule", "8:10", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("N ≥ 2·n0"), "{}", stderr(&o));
    let o = run(&["scenario", "multideriv-family", "--tol", "-1", "--out", &out]);
    assert_eq!(code(&o), 2);
    let sq = data("unit-square.json");
    let o = run(&["shape-deriv", "--polygon", sq.to_str().unwrap(), "--field", "(x, y, x)", "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("components"));
    let cw = dir.path().join("cw.json");
    fs::write(&cw, r#"{"vertices": [[0,0],[0,1],[1,1],[1,0]]}"#).unwrap();
    let o = run(&["shape-deriv", "--polygon", cw.to_str().unwrap(), "--out", &out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("counterclockwise"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"gird": 21}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "scenario", "traveling-interval", "--out", &out_arg(&dir)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gird"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Any byte soup as an input document exits 2.
    #[test]
    fn malformed_documents_exit_2(body in "[\\[\\]{}:,0-9a-z\" ]{0,40}", which in 0usize..4) {
        let dir = TempDir::new().unwrap();
        let f = dir.path().join("in.json");
        fs::write(&f, &body).unwrap();
        let p = f.to_str().unwrap();
        let out = out_arg(&dir);
        let gauss = data("gaussian.json");
        let opens = data("opens.json");
        let args: Vec<&str> = match which {
            0 => vec!["shape-deriv", "--polygon", p, "--out", &out],
            1 => vec!["fomin", "--measure", gauss.to_str().unwrap(), "--set", p, "--direction", "1", "--out", &out],
            2 => vec!["lsc", "--plot", p, "--opens", opens.to_str().unwrap(), "--out", &out],
            _ => vec!["svdiff", "--problem", p, "--out", &out],
        };
        let o = run(&args);
        prop_assert_eq!(code(&o), 2, "{}", stderr(&o));
    }
}
