//! End-to-end runs of the command-line front end against temporary files.

use std::fs;

use qonsager::cli;
use qonsager::repmat::{ChainOperator, SparseMatrix};
use qonsager::verify::{emit_operator, Report};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let mut a = vec!["qonsager"];
    a.extend_from_slice(args);
    let code = cli::run(a, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

#[test]
fn emit_coordinate_text_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w1.coo");
    let (code, _, err) = call(&["emit", "psi.W1", "--sites", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let m = SparseMatrix::from_coordinate_text(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m, emit_operator("psi.W1", 3).unwrap().matrix);
}

#[test]
fn emit_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    assert_eq!(call(&["emit", "hamiltonian", "--sites", "2", "--out", path.to_str().unwrap()]).0, 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let op = ChainOperator::from_json(&v).unwrap();
    assert_eq!(op.sites, 2);
    assert_eq!(op.matrix, emit_operator("hamiltonian", 2).unwrap().matrix);
}

#[test]
fn report_files_are_written_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, _) =
            call(&["verify", "builtin:negative-controls", "--sites", "3", "--no-timings", "--report", p.to_str().unwrap()]);
        assert_eq!(code, 1);
    }
    let ja = fs::read(&a).unwrap();
    assert_eq!(ja, fs::read(&b).unwrap());
    assert_eq!(fs::read(a.with_extension("txt")).unwrap(), fs::read(b.with_extension("txt")).unwrap());
    let rep = Report::from_json(std::str::from_utf8(&ja).unwrap()).unwrap();
    assert_eq!(rep.suite, "builtin:negative-controls");
    assert!(!rep.checks.is_empty());
    let keys: Vec<String> =
        serde_json::from_slice::<serde_json::Value>(&ja).unwrap()["checks"][0].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["id", "paper_ref", "params", "status", "residual", "support_observed", "millis"]);
}

#[test]
fn generic_mode_is_reproducible() {
    let args = ["verify", "builtin:all", "--mode", "generic", "--seed", "11", "--sites", "3", "--no-timings"];
    let (c1, o1, _) = call(&args);
    let (c2, o2, _) = call(&args);
    assert_eq!(c1, 0, "{o1}");
    assert_eq!((c1, o1), (c2, o2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.suite");
    fs::write(&good, "check q.serre {\n  kind = identity\n  lhs = c(e0, qc(e0, qc(e0, e1, 1), -1))\n  rhs = 0\n}\n").unwrap();
    assert_eq!(call(&["verify", good.to_str().unwrap(), "--sites", "2"]).0, 0);

    let bad = dir.path().join("bad.suite");
    fs::write(&bad, "check x {\n  kind = identity\n  lhs = qc(e0 e1)\n  rhs = 0\n}\n").unwrap();
    let (code, _, err) = call(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains(":3:"), "{err}");

    assert_eq!(call(&["verify", "builtin:negative-controls", "--sites", "3"]).0, 1);
    assert_eq!(call(&["verify", "builtin:all", "--sites", "40"]).0, 2);
    assert_eq!(call(&["verify", "builtin:all", "--sites", "0"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["list"]).0, 0);
}
