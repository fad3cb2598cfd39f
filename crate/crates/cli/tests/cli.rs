use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn suffdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_suffdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn divergence_report() {
    let v = json(&suffdiv(&["divergence", "--p", "[0.5,0.5]", "--q", "[0.25,0.75]"]));
    assert_eq!(v["schema_version"], 1);
    assert!((v["kl_nats"].as_f64().unwrap() - 0.143_841_036_225_890_46).abs() <= 1e-12);

    let v = json(&suffdiv(&["--bits", "divergence", "--p", "[1,0]", "--q", "[0.5,0.5]"]));
    assert!((v["kl_bits"].as_f64().unwrap() - 1.0).abs() <= 1e-15);

    let v = json(&suffdiv(&["divergence", "--p", "[0.5,0.5]", "--q", "[1,0]"]));
    assert_eq!(v["kl_nats"], "inf");
}

#[test]
fn validation_errors_exit_with_two() {
    let out = suffdiv(&["portfolio", "solve", "--market", "missing.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
    assert!(out.stdout.is_empty());

    assert_eq!(suffdiv(&["divergence", "--p", "[0.5,0.6]", "--q", "[0.5,0.5]"]).status.code(), Some(2));
    assert_eq!(suffdiv(&["thermo", "--levels", "[0]", "--T", "-1", "--state", "[1]"]).status.code(), Some(2));
    assert_eq!(suffdiv(&["suffcheck", "--divergence", "kl", "--trials", "3"]).status.code(), Some(2));
    assert_eq!(suffdiv(&["suffcheck", "--divergence", "kl", "--dims", "2", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(suffdiv(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let market = write(dir.path(), "m.csv", "prob,x1,x2,x3\n0.31,1.13,2.07,0.59\n0.27,2.11,0.93,1.41\n0.42,0.77,1.19,1.73\n");
    let out = suffdiv(&["--tol", "1e-300", "portfolio", "solve", "--market", &market]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("KKT residual"));
}

#[test]
fn portfolio_reports() {
    let dir = tempfile::tempdir().unwrap();
    let race = write(dir.path(), "race.csv", "prob,x1,x2\n0.6,2,0\n0.4,0,2\n");
    let v = json(&suffdiv(&["portfolio", "solve", "--market", &race]));
    assert!((v["b"][0].as_f64().unwrap() - 0.6).abs() <= 1e-9);
    assert!((v["W_nats"].as_f64().unwrap() - 0.020_135_513_550_688_87).abs() <= 1e-12);
    assert!(v["kkt_residual"].as_f64().unwrap() <= 1e-9);

    let crossed = write(dir.path(), "crossed.csv", "prob,x1,x2\n0.5,1,2\n0.5,2,1\n");
    let v = json(&suffdiv(&["portfolio", "regret", "--market", &crossed, "--Q", "[0.9,0.1]"]));
    assert!((v["bound_nats"].as_f64().unwrap() - 0.510_825_623_765_990_7).abs() <= 1e-12);
    assert!(v["gap_nats"].as_f64().unwrap() > 0.4);
    assert_eq!(v["horse_race"], false);

    let cash = write(dir.path(), "cash.csv", "prob,x1\n1,1.04\n");
    let v = json(&suffdiv(&["portfolio", "simulate", "--market", &cash, "--b", "[1]", "--n", "5", "--seed", "1", "--path"]));
    assert!((v["terminal_rate_nats"].as_f64().unwrap() - 1.04f64.ln()).abs() <= 1e-14);
    assert_eq!(v["log_wealth_nats"].as_array().unwrap().len(), 5);

    let v = json(&suffdiv(&["portfolio", "simulate", "--market", &race, "--b", "[1,0]", "--n", "50", "--seed", "1"]));
    assert_eq!(v["terminal_rate_nats"], "-inf");
}

#[test]
fn market_rows_are_named_in_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "prob,x1,x2\n0.5,1,1\n0.5,-2,1\n");
    let out = suffdiv(&["portfolio", "solve", "--market", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}

#[test]
fn score_thermo_and_bregman_reports() {
    let v = json(&suffdiv(&["score", "--rule", "log", "--P", "[0.3,0.7]", "--Q", "[0.3,0.7]"]));
    assert_eq!(v["proper"], true);
    assert!(v["divergence_nats"].as_f64().unwrap().abs() <= 1e-15);

    let v = json(&suffdiv(&["score", "--rule", "linear", "--P", "[0.3,0.7]", "--Q", "[0.4,0.6]"]));
    assert_eq!(v["proper"], false);
    assert!(v["witness"]["p"].is_array());

    let v = json(&suffdiv(&["score", "--rule", "from-generator", "--generator", "sqnorm", "--P", "[0.3,0.7]", "--Q", "[0.4,0.6]"]));
    assert!((v["divergence"].as_f64().unwrap() - 0.02).abs() <= 1e-12);

    let v = json(&suffdiv(&["thermo", "--levels", "[0, 4.143e-21]", "--T", "300", "--state", "[1,0]"]));
    assert!((v["Ex_joules"].as_f64().unwrap() - 1.297_843_171_387_997e-21).abs() <= 1e-25);
    assert!(v["identity_gap"].as_f64().unwrap() <= 1e-9 * 4.143e-21);

    let dir = tempfile::tempdir().unwrap();
    let table = write(dir.path(), "quad.json", r#"{"0": 0, "0.5": 0.25, "1": 1}"#);
    let gen = format!("table:{table}");
    let v = json(&suffdiv(&["bregman", "--generator", &gen, "--p", "[0.2,0.8]", "--q", "[0.6,0.4]"]));
    assert_eq!(v["generator"], "table:quad");
    assert!(v["divergence"].as_f64().unwrap() >= 0.0);

    let v = json(&suffdiv(&["bregman", "--generator", "negentropy", "--compare", "sqnorm", "--p", "[0.2,0.8]", "--q", "[0.6,0.4]"]));
    assert_eq!(v["affine_equivalent"], false);
}

#[test]
fn suffcheck_report_round_trips() {
    let out = suffdiv(&["suffcheck", "--divergence", "sqnorm", "--dims", "3,4", "--trials", "8", "--seed", "7"]);
    let v = json(&out);
    assert_eq!(v["verdict"], "fails");
    assert_eq!(v["trials"].as_array().unwrap().len(), 16);
    assert!(v["worst"]["pair"]["phi"].is_array());
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
}

#[test]
fn config_files_replay_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "suffcheck", "seed": 7, "options": {"divergence": "kl", "dims": "3", "trials": 10}}"#,
    );
    let from_config = suffdiv(&["--config", &cfg]);
    let direct = suffdiv(&["suffcheck", "--divergence", "kl", "--dims", "3", "--trials", "10", "--seed", "7"]);
    assert!(from_config.status.success());
    assert_eq!(from_config.stdout, direct.stdout);

    let typo = write(dir.path(), "typo.json", r#"{"command": "suffcheck", "sede": 7}"#);
    assert_eq!(suffdiv(&["--config", &typo]).status.code(), Some(2));

    let unseeded = write(dir.path(), "unseeded.json", r#"{"command": "suffcheck", "options": {"divergence": "kl"}}"#);
    assert_eq!(suffdiv(&["--config", &unseeded]).status.code(), Some(2));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let out = suffdiv(&[
        "--format", "csv", "--output", target.to_str().unwrap(),
        "divergence", "--p", "[0.5,0.5]", "--q", "[0.25,0.75]",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("schema_version,command,kl_nats,"));
}
