//! End-to-end checks of the `uavnet` binary: exit codes, output shapes,
//! and byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

fn uavnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.json");
    std::fs::write(
        &path,
        r#"{
            "region": {"side_length_m": 2000.0},
            "n_users": 40,
            "uavs": [{"x_m": 1000.0, "y_m": 1000.0, "altitude_m": 500.0}],
            "environment": "urban",
            "seed": 3
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn erlang_blocking_probability() {
    let out = uavnet(&["erlang", "--load", "2", "--channels", "5"]);
    assert!(out.status.success());
    let value: f64 = stdout_of(&out).trim().parse().unwrap();
    assert!((value - 0.036_697_247_7).abs() < 1e-9);
}

#[test]
fn erlang_channel_sizing() {
    let out = uavnet(&["erlang", "--load", "2", "--gos", "0.05"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).trim(), "5");
}

#[test]
fn erlang_rejects_bad_input() {
    let out = uavnet(&["erlang", "--load", "-1", "--channels", "5"]);
    assert_eq!(out.status.code(), Some(2));
    // Requires exactly one of --channels / --gos.
    let neither = uavnet(&["erlang", "--load", "2"]);
    assert_eq!(neither.status.code(), Some(2));
    let both = uavnet(&["erlang", "--load", "2", "--channels", "3", "--gos", "0.1"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn solve_emits_json_with_plan_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = uavnet(&["solve", "--scenario", scenario.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["meta"]["n_users"], 40);
    assert_eq!(json["meta"]["uavs"], 1);
    assert_eq!(json["meta"]["environment"]["source"], "builtin-preset");
    assert!(json["plan"]["b_c"].as_f64().unwrap() > 0.0);
    assert!(json["report"]["e_total"].as_f64().unwrap() > 0.0);
    assert!(json["report"]["save_rate"].as_f64().unwrap() >= 0.0);
    assert!(json["demands"]["k_r"].as_u64().unwrap() >= 1);
}

#[test]
fn solve_uavs_flag_replaces_deployment() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = uavnet(&[
        "solve",
        "--scenario",
        scenario.to_str().unwrap(),
        "--uavs",
        "2",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(json["meta"]["uavs"], 2);
    let rejected = uavnet(&[
        "solve",
        "--scenario",
        scenario.to_str().unwrap(),
        "--uavs",
        "3",
    ]);
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn solve_csv_summary_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = uavnet(&["solve", "--scenario", scenario.to_str().unwrap(), "--csv"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("uavs,n_users,environment,"));
    assert!(lines[1].starts_with("1,40,urban,"));
}

#[test]
fn solve_rejects_invalid_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"uavs": 1, "n_users": 10, "environment": "lunar"}"#,
    )
    .unwrap();
    let out = uavnet(&["solve", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = uavnet(&["solve", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{
            "variable": "n_users",
            "values": [20, 30],
            "environment": "suburban",
            "replications": 2,
            "seed": 5
        }"#,
    )
    .unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let run_a = uavnet(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert!(run_a.status.success());
    let run_b = uavnet(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(run_b.status.success());
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "variable,value,save_rate_mean,save_rate_std,e_single_mean,e_double_mean,crossover\n"
    ));
    assert_eq!(text.trim_end().lines().count(), 3);
}

#[test]
fn sweep_rejects_bad_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"variable": "n_users", "values": [], "environment": "urban"}"#,
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let run = uavnet(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn compare_uavs_reports_both_deployments() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = uavnet(&["compare-uavs", "--scenario", scenario.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let single = json["e_single_total"].as_f64().unwrap();
    let double = json["e_double_total"].as_f64().unwrap();
    assert!(single > 0.0 && double > 0.0);
    assert_eq!(json["double_better"].as_bool().unwrap(), double < single);
    let prop_double = json["double_report"]["e_propulsion"].as_f64().unwrap();
    let prop_single = json["single_report"]["e_propulsion"].as_f64().unwrap();
    assert_eq!(prop_double, 2.0 * prop_single);
}
