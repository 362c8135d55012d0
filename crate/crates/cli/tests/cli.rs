use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn robsyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robsyn")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn example(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = robsyn(args);
    assert!(out.status.success());
    let path = dir.join(name);
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_then_verify_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let strat = dir.path().join("s.json");
    let out = robsyn(&["synth", s(&doc), "--out", s(&strat)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sigma"], "1");
    assert_eq!(v["strategy"]["choices"]["q0"][0], "a");
    let out = robsyn(&["verify", s(&doc), "--strategy", s(&strat)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sigma"], "1");
}

#[test]
fn validate_reports_table_triangle_findings_as_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let out = robsyn(&["validate", s(&doc)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert!(v["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("d(q2,q5)")));
}

#[test]
fn validate_rejects_broken_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    v["metric"]["matrix"][0][1] = Value::from("3");
    std::fs::write(&doc, serde_json::to_string(&v).unwrap()).unwrap();
    let out = robsyn(&["validate", s(&doc)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["valid"], false);
    assert_eq!(robsyn(&["synth", s(&doc)]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("bad.json");
    std::fs::write(&doc, "{\n  \"states\": [\n").unwrap();
    let out = robsyn(&["synth", s(&doc)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(robsyn(&["synth"]).status.code(), Some(2));
    assert_eq!(robsyn(&["example", "leader-election", "--rule", "median"]).status.code(), Some(2));
}

#[test]
fn non_winning_strategy_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let strat = dir.path().join("s.json");
    std::fs::write(&strat, r#"{"kind": "memoryless", "choices": {"q0": ["a"]}}"#).unwrap();
    let out = robsyn(&["verify", s(&doc), "--strategy", s(&strat)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].as_str().unwrap().contains("not nominally winning"));
}

#[test]
fn fault_bound_and_simulation_on_buchi_variant() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "rb.json", &["example", "running", "--buchi"]);
    let strat = dir.path().join("s.json");
    std::fs::write(&strat, r#"{"kind": "memoryless", "choices": {"q0": ["a"], "q1": ["a"], "q2": ["a"], "q3": ["a"], "q4": ["a"], "q5": ["a"], "q6": ["a"]}}"#).unwrap();
    let out = robsyn(&["fault-bound", s(&doc), "--strategy", s(&strat), "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 2);
    assert_eq!(v["search"]["verdict"], "no-violation-found");

    let out = robsyn(&["simulate", s(&doc), "--strategy", s(&strat), "--script", "1:q4", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["trace"], serde_json::json!(["q0", "q4", "q6"]));

    let out = robsyn(&["simulate", s(&doc), "--strategy", s(&strat), "--script", "1:q4,2:q6", "--spacing", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let a = json(&robsyn(&["simulate", s(&doc), "--strategy", s(&strat), "--n-bound", "2", "--seed", "9"]));
    let b = json(&robsyn(&["simulate", s(&doc), "--strategy", s(&strat), "--n-bound", "2", "--seed", "9"]));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 9);
}

#[test]
fn certify_constructs_and_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let strat = dir.path().join("s.json");
    let cert = dir.path().join("c.json");
    robsyn(&["synth", s(&doc), "--out", s(&strat)]);
    let out = robsyn(&["certify", s(&doc), "--strategy", s(&strat), "--out", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    let built = json(&out);
    let out = robsyn(&["certify", s(&doc), "--certificate", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), built);
    assert_eq!(robsyn(&["certify", s(&doc)]).status.code(), Some(2));
}

#[test]
fn dot_export_and_generators() {
    let dir = tempfile::tempdir().unwrap();
    let doc = example(dir.path(), "r.json", &["example", "running"]);
    let out = robsyn(&["export-dot", s(&doc)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("doublecircle").count(), 1);
    let g = example(dir.path(), "g.json", &["example", "gray-code", "--bits", "3"]);
    assert_eq!(robsyn(&["validate", s(&g)]).status.code(), Some(0));
    assert_eq!(robsyn(&["example", "gray-code", "--bits", "0"]).status.code(), Some(2));
}
