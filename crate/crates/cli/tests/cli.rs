use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn regsets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regsets")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_then_classify_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gamma.txt");
    let out = regsets(&["construct", "--family", "gamma", "--q", "9", "--a", "1", "--out", path(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("regsets-pointset 1\n3 4 2 1 0 0 1 81 "));
    assert_eq!(text.lines().count(), 2 + 730);

    let out = regsets(&["classify", path(&file)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["bracket"], "[9; 4, 7, 10, 13]");
    assert_eq!(v["is_regular_pointed"], true);
}

#[test]
fn spectrum_and_code_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gamma.json");
    let out = regsets(&["construct", "--family", "gamma", "--q", "9", "--a", "5", "--format", "json", "--out", path(&file)]);
    assert!(out.status.success());

    let out = regsets(&["spectrum", path(&file), "--check"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["enumerator"]["1"], 1);
    assert_eq!(v["enumerator"]["10"], 2268);
    assert_eq!(v["line_scan_agrees"], true);
    assert_eq!(v["identities"], "ok");

    let matrix = dir.path().join("g.txt");
    let out = regsets(&["code", path(&file), "--family", "trace-norm:9", "--modulus", "729", "--matrix", path(&matrix)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["parameters"], "[730,3,717]_81");
    assert_eq!(v["weights"]["729"], 80);
    assert_eq!(v["weights"]["717"], 116640);
    assert_eq!(v["reduction"]["nonnegative"], "1 + 648x^720 + 80x^729");
    assert_eq!(v["family_reduction"]["pass"], true);
    assert_eq!(std::fs::read_to_string(&matrix).unwrap().lines().count(), 4);
}

#[test]
fn verify_thm12_at_q9() {
    let out = regsets(&["verify", "--suite", "thm12", "--q", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"][0]["computed"]["brackets"]["[9; 4, 7, 10, 13]"], 80);
}

#[test]
fn verify_codes_at_q4_reports_both_classes() {
    let out = regsets(&["verify", "--suite", "codes", "--q", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[65,3,60]_16 with 2 weights"));
    assert!(text.contains("[65,3,58]_16 with 4 weights"));
}

#[test]
fn verify_is_reproducible() {
    let a = regsets(&["verify", "--suite", "thm13", "--q", "16", "--seed", "7"]);
    let b = regsets(&["verify", "--suite", "thm13", "--q", "16", "--seed", "7", "--workers", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(regsets(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(regsets(&["verify", "--suite", "thm12", "--q", "7"]).status.code(), Some(2));
    assert_eq!(regsets(&["construct", "--family", "gamma", "--q", "9"]).status.code(), Some(2));
    assert_eq!(regsets(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(regsets(&["conjecture", "--p", "3", "--h", "2"]).status.code(), Some(2));
}

#[test]
fn lift_and_complement_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("oval.txt");
    let lifted = dir.path().join("lift.txt");
    let comp = dir.path().join("comp.txt");
    assert!(regsets(&["construct", "--family", "oval", "--q", "3", "--variant", "1", "--out", path(&base)]).status.success());
    let out = regsets(&["construct", "--family", "lift", "--input", path(&base), "--h", "2", "--s", "1", "--out", path(&lifted)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&lifted).unwrap();
    // 3 affine base points, each lifted to 3, plus (∞)
    assert_eq!(text.lines().count(), 2 + 10);
    assert!(regsets(&["construct", "--family", "complement", "--input", path(&base), "--out", path(&comp)]).status.success());
    let v = json(&regsets(&["classify", path(&comp)]));
    assert_eq!(v["is_regular_pointed"], true);
}

#[test]
fn scans() {
    let v = json(&regsets(&["scan-f", "--q", "2"]));
    assert_eq!(v["entries"][0]["map"], "additive[0,0]");
    assert_eq!(v["entries"][0]["unital"], true);
    let out = regsets(&["conjecture", "--p", "2", "--h", "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["all_congruent"], true);
    let out = regsets(&["hermitian-scan", "--q", "4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn touching_from_b_list() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.txt");
    let out = regsets(&["construct", "--family", "touching", "--q", "7", "--B", "0,1,3", "--out", path(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&regsets(&["classify", path(&file)]));
    assert_eq!(v["t"], 3);
}
