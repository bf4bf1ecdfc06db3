use std::path::Path;
use std::process::{Command, Output};

fn cimqubo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cimqubo"))
        .current_dir(dir)
        .env_remove("CIMQUBO_INSTANCE_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = cimqubo(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_then_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["-q", "gen", "--n", "12", "--seed", "7", "-o", "a.qkp"]);
    let text = ok(tmp.path(), &["-q", "oracle", "a.qkp"]);
    assert!(text.contains("best_value: "), "{text}");
    assert!(text.contains("best_config: "), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&ok(tmp.path(), &["-q", "--format", "json", "oracle", "a.qkp"])).unwrap();
    assert_eq!(json["best_config"].as_str().unwrap().len(), 12);
}

#[test]
fn transform_penalty_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["-q", "gen", "--n", "20", "--seed", "7", "-o", "a.json"]);
    let inst: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("a.json")).unwrap()).unwrap();
    let capacity = inst["capacity"].as_u64().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&ok(
        tmp.path(),
        &[
            "-q",
            "transform",
            "a.json",
            "--mode",
            "dqubo",
            "--alpha",
            "2",
            "--beta",
            "2",
        ],
    ))
    .unwrap();
    assert_eq!(doc["dim"].as_u64().unwrap(), 20 + capacity);
    let doc: serde_json::Value =
        serde_json::from_str(&ok(tmp.path(), &["-q", "transform", "a.json", "--mode", "ineq"])).unwrap();
    assert_eq!(doc["dim"].as_u64().unwrap(), 20);
}

#[test]
fn bench_is_reproducible_and_thread_independent() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("instances")).unwrap();
    for seed in ["1", "2"] {
        let path = format!("instances/i{seed}.qkp");
        ok(tmp.path(), &["-q", "gen", "--n", "10", "--seed", seed, "-o", &path]);
    }
    let args = |jobs: &'static str| {
        vec![
            "-q",
            "--jobs",
            jobs,
            "bench",
            "--dir",
            "instances",
            "--report",
            "out.csv",
            "--seed",
            "1",
            "--initials",
            "6",
            "--runs",
            "3",
            "--iters",
            "200",
        ]
    };
    ok(tmp.path(), &args("1"));
    let first = std::fs::read(tmp.path().join("out.csv")).unwrap();
    ok(tmp.path(), &args("4"));
    let second = std::fs::read(tmp.path().join("out.csv")).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("# {"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bench_writes_per_run_files() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("instances")).unwrap();
    ok(
        tmp.path(),
        &["-q", "gen", "--n", "8", "--seed", "5", "-o", "instances/x.qkp"],
    );
    ok(
        tmp.path(),
        &[
            "-q",
            "bench",
            "--dir",
            "instances",
            "--seed",
            "9",
            "--initials",
            "2",
            "--runs",
            "2",
            "--iters",
            "50",
            "--runs-dir",
            "runs",
            "-o",
            "r.csv",
        ],
    );
    for mode in ["ineq", "dqubo"] {
        let runs = std::fs::read_to_string(tmp.path().join(format!("runs/gen_n8_s5_{mode}_9.csv"))).unwrap();
        assert_eq!(runs.lines().count(), 2 + 4);
    }
}

#[test]
fn instance_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("instances")).unwrap();
    ok(
        tmp.path(),
        &["-q", "gen", "--n", "30", "--seed", "5", "-o", "instances/x.qkp"],
    );
    let out = Command::new(env!("CARGO_BIN_EXE_cimqubo"))
        .current_dir(tmp.path())
        .env("CIMQUBO_INSTANCE_DIR", "instances")
        .args(["-q", "overhead"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("gen_n30_s5,30,"), "{text}");
}

#[test]
fn solve_and_filter_eval_reports() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["-q", "gen", "--n", "10", "--seed", "3", "-o", "a.qkp"]);
    let runs = ok(
        tmp.path(),
        &[
            "-q",
            "solve",
            "a.qkp",
            "--backend",
            "cim",
            "--initials",
            "2",
            "--runs",
            "2",
            "--iters",
            "100",
            "--trajectory",
            "t.csv",
        ],
    );
    assert_eq!(runs.lines().count(), 2 + 4);
    let traj = std::fs::read_to_string(tmp.path().join("t.csv")).unwrap();
    assert_eq!(traj.lines().nth(1).unwrap(), "iteration,energy,accepted,feasible");
    assert_eq!(traj.lines().count(), 2 + 100);
    let study = ok(tmp.path(), &["-q", "filter-eval", "a.qkp", "--configs", "4"]);
    assert_eq!(study.lines().count(), 2 + 4);
}

#[test]
fn defaults_are_printed_to_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cimqubo(tmp.path(), &["gen", "--n", "5"]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("config: {"), "{err}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cimqubo(tmp.path(), &["oracle", "--nope"]).status.code(), Some(2));
    assert_eq!(cimqubo(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    let missing = cimqubo(tmp.path(), &["-q", "oracle", "missing.qkp"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));
    std::fs::write(tmp.path().join("bad.qkp"), "name\n3\n1 2\n").unwrap();
    let bad = cimqubo(tmp.path(), &["-q", "oracle", "bad.qkp"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("parse error"));
    assert!(cimqubo(tmp.path(), &["--version"]).status.success());
}
