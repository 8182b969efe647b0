use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_operadkit")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad JSON ({e}): {out}\n{err}"));
    (code, v)
}

#[test]
fn envelope_fields() {
    let (code, v) = json(&["family", "com", "--horizon", "6", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "family");
    assert_eq!(v["field"], "Q");
    assert_eq!(v["horizon"], 6);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
}

#[test]
fn hilbert_csv_has_one_row_per_arity() {
    let (code, out, _) = run(&["hilbert", "--family", "com", "--horizon", "20", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[0], "arity,dim");
    assert_eq!(lines[21], "20,1");
}

#[test]
fn axioms_pass_for_mas() {
    let (code, v) = json(&["axioms", "--family", "mas", "--horizon", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
}

#[test]
fn prime_reports_mas_witness_and_exits_one() {
    let (code, v) = json(&["prime", "--family", "mas", "--horizon", "10"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["verdict"]["verdict"], "witness");
    let (code, v) = json(&["prime", "--family", "com", "--horizon", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["verdict"]["verdict"], "no_violation_found");
}

#[test]
fn torsion_detected_in_dual_numbers() {
    let (code, _) = json(&["torsion", "--algebra", "polynomial", "--horizon", "8"]);
    assert_eq!(code, 0);
    let (code, _) = json(&["torsion", "--algebra", "dual-numbers", "--horizon", "8"]);
    assert_eq!(code, 1);
}

#[test]
fn functor_images() {
    let (code, v) = json(&["functor", "g-str", "--algebra", "polynomial", "--horizon", "6"]);
    assert_eq!(code, 0, "{v}");
    let (code, _) = json(&["functor", "g-atr", "--algebra", "bc", "--type", "odd", "--horizon", "6"]);
    assert_eq!(code, 0);
}

#[test]
fn worked_examples_run() {
    let (code, v) = json(&["example", "nested-repeat", "--mode", "custom", "--schedule", "1,5,40"]);
    assert_eq!(code, 0, "{v}");
    let (code, _) = json(&["example", "squarefree", "--horizon", "64"]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["example", "field-tower", "--horizon", "300", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.lines().count() > 300);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["family", "nonsense"]).0, 2);
    assert_eq!(run(&["prime", "--family", "mas", "--format", "csv"]).0, 2);
    assert_eq!(run(&["example", "squarefree", "--horizon", "100"]).0, 2);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("operadkit-cli-{}.json", std::process::id()));
    let (code, _, _) = run(&["gkdim", "--family", "ope", "--horizon", "30", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "gkdim");
    std::fs::remove_file(path).ok();
}
