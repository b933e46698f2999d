use std::process::{Command, Output};

use serde_json::Value;

fn ecds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecds"))
        .args(args)
        .env_remove("ECDS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr_error(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is json");
    v["error"].clone()
}

#[test]
fn ip_bound_is_exact() {
    let v = stdout_json(&ecds(&["bounds", "ip", "--n", "4", "--r", "2", "--eps", "0.25", "--p", "1"]));
    assert_eq!(v["exact"], "11/16");
    assert_eq!(v["value"].as_f64(), Some(0.6875));
}

#[test]
fn bounds_csv() {
    let out = ecds(&["bounds", "threshold", "--delta", "0.01", "--eps", "0.25", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,formula,inputs,value,exact\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn discrepancy_exhaustive() {
    let v = stdout_json(&ecds(&["bounds", "discrepancy", "--n", "3", "--r", "2"]));
    assert_eq!(v["violations"], 0);
    assert_eq!(v["gram_ok"], true);
}

#[test]
fn noiseless_hadamard_ip_has_zero_error() {
    let v = stdout_json(&ecds(&[
        "experiment", "--scheme", "had-ip", "--n", "8", "--delta", "0", "--trials", "1000", "--seed", "7",
    ]));
    assert_eq!(v["worst_error"].as_f64(), Some(0.0));
    assert_eq!(v["flip_budget"], 0);
}

#[test]
fn experiment_csv_has_header_and_rows() {
    let out = ecds(&[
        "experiment", "--scheme", "had-ldc", "--n", "4", "--delta", "0.05", "--adversary", "random_flips",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn identical_arguments_give_identical_output() {
    let args = [
        "experiment", "--scheme", "bmrv", "--n", "16", "--s", "1", "--eps", "0.2", "--delta", "0.02",
        "--adversary", "random_flips", "--trials", "2000", "--mode", "sample", "--seed", "3",
    ];
    let a = ecds(&args);
    let b = ecds(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_sweep_prints_empty_array() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(&grid, "{}").unwrap();
    let out = ecds(&["sweep", "--grid", grid.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, Value::Array(vec![]));
}

#[test]
fn sweep_runs_grid() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.json");
    std::fs::write(
        &grid,
        r#"{"schemes":[{"scheme":"had-ldc","n":3},{"scheme":"ip-table","n":4,"r":9,"p":1}],
            "deltas":[0.0,0.05],"adversaries":["random_flips"],"trials":500,"seed":1}"#,
    )
    .unwrap();
    let out = ecds(&["sweep", "--grid", grid.to_str().unwrap()]);
    assert!(out.status.success());
    let cells: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cells.len(), 4);
    assert_eq!(cells.iter().filter(|c| c.get("error").is_some()).count(), 2);
}

#[test]
fn bad_parameters_fail_with_json_error() {
    let out = ecds(&["experiment", "--scheme", "ip-table", "--n", "3", "--r", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["code"], "invalid_parameter");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_flag_for_scheme() {
    let out = ecds(&["experiment", "--scheme", "bmrv", "--n", "8", "--s", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_error(&out)["message"].as_str().unwrap().contains("--eps"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = ecds(&["bounds", "ip", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["code"], "usage");
}

#[test]
fn help_exits_cleanly() {
    let out = ecds(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
}

#[test]
fn unreadable_structure_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "not a header\n").unwrap();
    let out = ecds(&["decode", "--in", bad.to_str().unwrap(), "--query", "0"]);
    assert_eq!(out.status.code(), Some(6));
    assert_eq!(stderr_error(&out)["code"], "parse");
}

#[test]
fn build_attack_decode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.txt");
    let dirty = dir.path().join("dirty.txt");
    let built = stdout_json(&ecds(&[
        "build", "--scheme", "had-ldc", "--n", "6", "--item", "101100", "--out", clean.to_str().unwrap(),
    ]));
    assert_eq!(built["header"]["length"], 64);

    let attacked = stdout_json(&ecds(&[
        "attack", "--in", clean.to_str().unwrap(), "--adversary", "greedy_local", "--delta", "0.05",
        "--query", "2", "--seed", "4", "--out", dirty.to_str().unwrap(),
    ]));
    assert_eq!(attacked["budget"], 3);
    assert!(attacked["flips"].as_u64().unwrap() <= 3);

    for q in 0..6 {
        let q = q.to_string();
        let v = stdout_json(&ecds(&["decode", "--in", clean.to_str().unwrap(), "--query", &q]));
        assert_eq!(v["correct"], true);
        assert_eq!(v["probes"].as_array().unwrap().len(), 2);
        let v = stdout_json(&ecds(&["decode", "--in", dirty.to_str().unwrap(), "--query", &q, "--seed", "9"]));
        assert_eq!(v["corrupted_positions"], attacked["flips"]);
    }
}

#[test]
fn targeted_attack_needs_query() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    stdout_json(&ecds(&["build", "--scheme", "had-ip", "--n", "4", "--out", path.to_str().unwrap()]));
    let out = ecds(&["attack", "--in", path.to_str().unwrap(), "--adversary", "probe_set_killer", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ecds"));
        cmd.args(["build", "--scheme", "had-ldc", "--n", "8"]).env_remove("ECDS_SEED");
        if let Some(s) = seed {
            cmd.env("ECDS_SEED", s);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("0")), run(None));
    assert_ne!(run(Some("5")), run(None));
}
