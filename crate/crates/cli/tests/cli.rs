use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmt-lss")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    let text = stdout(out);
    let end = text.rfind('}').expect("json object on stdout");
    serde_json::from_str(&text[..=end]).expect("valid json")
}

fn csv_rows(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,density"));
    lines
        .map(|l| {
            let (x, d) = l.split_once(',').unwrap();
            (x.parse().unwrap(), d.parse().unwrap())
        })
        .collect()
}

fn trapezoid(rows: &[(f64, f64)]) -> f64 {
    rows.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

fn experiment_config(dir: &Path, name: &str, pipeline: &str, reps: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join(name);
    let text = format!(
        r#"{{"pipeline":"{pipeline}","p":10,"n":30,"law_x":{{"kind":"real-gaussian"}},"law_y":{{"kind":"real-gaussian"}},
        "shape":{{"kind":"identity"}},"f":{{"kind":"polynomial","coefficients":[0,0,1]}},"reps":{reps},
        "master_seed":{seed},"centering_convention":"nminus1"}}"#
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_matches_quadratic_root() {
    let out = run(&["solve", "--z", "0+1i", "--y", "1", "--h", "mp"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["m_under"]["re"].as_f64().unwrap() - 0.300_242_590_220_120_5).abs() < 1e-10);
    assert!((v["m_under"]["im"].as_f64().unwrap() - 0.624_810_533_843_826_6).abs() < 1e-10);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn solve_at_zero_ratio() {
    let v = json(&run(&["solve", "--z", "0+1i", "--y", "0", "--h", "mp"]));
    assert!(v["m_under"]["re"].as_f64().unwrap().abs() < 1e-14);
    assert!((v["m_under"]["im"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn malformed_input_is_a_usage_error() {
    for args in [
        &["solve", "--z", "0+1x", "--y", "1"][..],
        &["solve", "--z", "1+1i", "--y", "1", "--bogus"],
        &["solve", "--z", "1+1i", "--y", "1", "--h", "atoms=1"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn unreachable_tolerance_is_numerical_failure() {
    let out = run(&["solve", "--z", "3+0.001i", "--y", "0.7", "--h", "atoms=1:0.3,3:0.5,10:0.2", "--tol", "1e-19"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn f_support_endpoints() {
    let out = run(&["support", "--y1", "0.5", "--y2", "0.25"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.077975 5.699802");
}

#[test]
fn mp_density_csv_integrates_to_one() {
    let out = run(&["density", "--y", "0.5"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("support: 0.0857"));
    let rows = csv_rows(&stdout(&out));
    assert!((trapezoid(&rows) - 1.0).abs() < 1e-4);
}

#[test]
fn f_density_vanishes_off_support() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = run(&["density", "--y1", "0.5", "--y2", "0.25", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&fs::read_to_string(path).unwrap());
    let (lo, hi) = (0.077_975_413, 5.699_802_365);
    assert!(rows.iter().any(|r| r.0 < lo) && rows.iter().any(|r| r.0 > hi));
    for (x, d) in &rows {
        if *x < lo || *x > hi {
            assert_eq!(*d, 0.0, "density {d} at {x}");
        }
    }
    assert!((trapezoid(&rows) - 1.0).abs() < 1e-4);
}

#[test]
fn verify_shift_and_interlacing() {
    let out = run(&["verify", "--lemma", "4.1", "--y", "0.5", "--z", "4+0i", "--n", "100,200,400"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lemma_id"], "4.1");
    assert_eq!(stdout(&out).lines().last(), Some("PASS"));

    let out = run(&["verify", "--lemma", "interlacing", "--p", "50", "--n", "100", "--reps", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reps"], 1000);
}

#[test]
fn verify_unknown_lemma() {
    assert_eq!(run(&["verify", "--lemma", "9.9"]).status.code(), Some(1));
}

#[test]
fn experiment_writes_results_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = experiment_config(dir.path(), "exp.json", "cov-centralized", 40, 3);
    let out_path = dir.path().join("out.json");
    let args =
        ["experiment", "--config", config.to_str().unwrap(), "--output", out_path.to_str().unwrap(), "--seed", "77"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("\"seed\":77"));
    let saved: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(saved["schema_version"], 1);
    assert_eq!(saved["config"]["master_seed"], 77);
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.starts_with("index,seed,value\n"));
    assert_eq!(csv.lines().count(), 41);

    run(&args);
    assert_eq!(fs::read_to_string(dir.path().join("out.csv")).unwrap(), csv);
}

#[test]
fn experiment_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["experiment", "--config", missing.to_str().unwrap()]).status.code(), Some(4));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"pipeline":"cov-centralized","p":10}"#).unwrap();
    assert_eq!(run(&["experiment", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn self_comparison_passes() {
    let dir = tempfile::tempdir().unwrap();
    let single = experiment_config(dir.path(), "one.json", "cov-centralized", 60, 11);
    let cfg = fs::read_to_string(single).unwrap();
    let path = dir.path().join("cmp.json");
    fs::write(&path, format!(r#"{{"a": {cfg}, "b": {cfg}}}"#)).unwrap();
    let out = run(&["compare", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["mean_diff"], 0.0);
    assert_eq!(report["var_ratio"], 1.0);
    assert_eq!(stdout(&out).lines().last(), Some("PASS"));
    assert!(dir.path().join("cmp.report.a.json").exists());
}

#[test]
fn bias_demo_reports_offset_and_limit() {
    let out = run(&["bias-demo", "--p", "100", "--n", "200", "--f", "x^2", "--reps", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("offset 0.251256"));
    assert!(text.contains("limit 0.250000"));
}

#[test]
fn thread_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_rmt-lss");
    let ok = Command::new(bin).env("RMT_THREADS", "1").args(["support", "--y", "0.5"]).output().unwrap();
    assert!(ok.status.success());
    let bad = Command::new(bin).env("RMT_THREADS", "many").args(["support", "--y", "0.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
