use std::process::{Command, Output};

use serde_json::Value;

fn gps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gps")).args(args).env_remove("GPS_CUTOFF").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn record(doc: &Value, power: f64) -> (f64, f64) {
    let r = doc["records"].as_array().unwrap().iter().find(|r| r["power"].as_f64() == Some(power)).unwrap();
    (r["re"].as_f64().unwrap(), r["im"].as_f64().unwrap())
}

#[test]
fn expand_semicircle_gives_catalan_numbers() {
    let out = gps(&["expand", "--law", "semicircle", "--cutoff", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["format"], "gps-series");
    for (k, c) in [1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0].iter().enumerate() {
        let (re, im) = record(&doc, 2.0 * k as f64);
        assert!((re - c).abs() < 1e-9 && im.abs() < 1e-12);
    }
}

#[test]
fn cutoff_comes_from_flag_then_environment() {
    let env = Command::new(env!("CARGO_BIN_EXE_gps"))
        .args(["expand", "--law", "cauchy"])
        .env("GPS_CUTOFF", "5")
        .output()
        .unwrap();
    assert_eq!(json(&env)["cutoff"].as_f64(), Some(5.0));
    let flag = Command::new(env!("CARGO_BIN_EXE_gps"))
        .args(["expand", "--law", "cauchy", "--cutoff", "7"])
        .env("GPS_CUTOFF", "5")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["cutoff"].as_f64(), Some(7.0));
    assert_eq!(json(&gps(&["expand", "--law", "cauchy"]))["cutoff"].as_f64(), Some(20.0));
}

#[test]
fn convolve_reads_expanded_files() {
    let dir = std::env::temp_dir().join(format!("gps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("b.json");
    let path = file.to_str().unwrap();
    assert_eq!(gps(&["expand", "--law", "bernoulli", "--cutoff", "10", "--out", path]).status.code(), Some(0));
    let out = gps(&["convolve", "--kind", "boolean", path, path]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    for n in 0..=5 {
        let (re, _) = record(&doc, 2.0 * n as f64);
        assert!((re - 2f64.powi(n)).abs() < 1e-12);
    }
    std::fs::write(&file, "{\"format\":\"other\"}").unwrap();
    assert_eq!(gps(&["convolve", "--kind", "free", path, path]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn classify_reports_verdicts() {
    let golden = json(&gps(&["classify", "--certificate", "golden", "--tested-range", "10000", "--profile-n", "1000"]));
    assert_eq!(golden["format"], "gps-evidence");
    assert_eq!(golden["verdict"], "NOT_IN_D_EVIDENCE");
    let rational = json(&gps(&["classify", "--certificate", "rational:22/7"]));
    assert_eq!(rational["verdict"], "RATIONAL");
    let sl = json(&gps(&["classify", "--certificate", "super-liouville", "--transform", "shift:1/3"]));
    assert_eq!(sl["verdict"], "CERTIFIED_IN_D");
}

#[test]
fn verify_passes_for_cauchy_and_flags_classical_alpha_above_one() {
    let out = gps(&["verify", "--law", "cauchy"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    let out = gps(&["verify", "--law", "classical-stable", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let checks = json(&out)["checks"].as_array().unwrap().clone();
    assert!(checks.iter().any(|c| c["name"] == "membership" && c["status"] == "pass-with-flag"));
}

#[test]
fn density_writes_csv() {
    let out = gps(&["density", "--law", "positive-stable", "--alpha", "0.5", "--x-min", "2", "--x-max", "8", "--points", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density,tail_bound,status"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(gps(&["expand", "--law", "classical-stable"]).status.code(), Some(2));
    assert_eq!(gps(&["expand", "--law", "pareto", "--beta", "-1"]).status.code(), Some(2));
    assert_eq!(gps(&["density", "--law", "supremum", "--alpha", "0.4", "--rho", "0.5", "--x-min", "2", "--x-max", "4"]).status.code(), Some(4));
    assert_eq!(gps(&["frobnicate"]).status.code(), Some(2));
}
