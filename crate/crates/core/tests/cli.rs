use std::path::Path;
use std::process::{Command, Output};

use hardylab::symmetrize::FieldSample;
use hardylab::Domain;
use serde_json::Value;

fn hardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn write_field(dir: &Path, name: &str, field: &FieldSample) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(field).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn constants_lists_hardy_and_both_gradient_forms() {
    let out = hardylab(&["constants", "--dim", "3", "--volume", "4.18879"]);
    assert_eq!(out.status.code(), Some(0));
    let records = lines(&out);
    let find = |id: &str| records.iter().find(|r| r["id"] == id).unwrap_or_else(|| panic!("{id} missing"));
    assert_eq!(find("hardy")["value"], 0.25);
    assert!((find("thm4_text")["value"].as_f64().unwrap() - 0.13428).abs() < 1e-4);
    assert!((find("thm4_stmt")["value"].as_f64().unwrap() - 0.03206).abs() < 1e-4);
}

#[test]
fn constants_rejects_p_outside_every_range() {
    let out = hardylab(&["constants", "--dim", "3", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(6/7, 1)"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(hardylab(&["verify", "--case", "nope"]).status.code(), Some(2));
    assert_eq!(hardylab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hardylab(&["constants", "--dim", "2"]).status.code(), Some(2));
}

#[test]
fn verify_cases_pass() {
    for args in [
        vec!["verify", "--case", "sobolev_disk", "--grid", "8192"],
        vec!["verify", "--case", "prop_log", "--dim", "3", "--grid", "8192"],
        vec!["verify", "--case", "hardy", "--seed", "7"],
    ] {
        let out = hardylab(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        let reports = lines(&out);
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r["pass"] == true));
    }
}

#[test]
fn failing_report_exits_with_one() {
    // a tolerance no solver can meet
    let out = hardylab(&["verify", "--case", "sobolev_disk", "--grid", "64", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(lines(&out).iter().any(|r| r["pass"] == false));
}

#[test]
fn csv_output_has_header() {
    let out = hardylab(&["verify", "--case", "thm5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut rows = text.lines();
    assert_eq!(rows.next().unwrap(), "case_id,params,computed,reference,rel_err,pass,notes");
    assert!(rows.next().unwrap().starts_with("thm5,"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = hardylab(&["verify", "--case", "hardy", "--seed", "3", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = hardylab(&["minimize", "--case", "thm2", "--p", "1", "--grid", "256", "--seed", "5"]);
    let second = hardylab(&["minimize", "--case", "thm2", "--p", "1", "--grid", "256", "--seed", "5"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn thread_count_is_honored() {
    let single = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["minimize", "--case", "thm1", "--grid", "256"])
        .env("HARDYLAB_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["minimize", "--case", "thm1", "--grid", "256"])
        .env("HARDYLAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(single.stdout, many.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["constants"])
        .env("HARDYLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn symmetrize_radial_field() {
    let dir = tempfile::tempdir().unwrap();
    let dom = Domain::unit_ball(3).unwrap();
    let field = FieldSample::from_radial(|r| 1.0 - r, &dom, 128).unwrap();
    let input = write_field(dir.path(), "radial.json", &field);
    let result = dir.path().join("result.json");
    let out = hardylab(&["symmetrize", "--input", &input, "--dim", "3", "--output", result.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = &lines(&out)[0];
    assert_eq!(report["case_id"], "dec");
    assert_eq!(report["pass"], true);
    assert!(report["rel_err"].as_f64().unwrap() < 1e-12);
    let full: Value = serde_json::from_str(&std::fs::read_to_string(result).unwrap()).unwrap();
    for key in ["f0", "F", "g", "psi", "fbar", "ubar", "lorentz_u", "lorentz_ubar"] {
        assert!(full.get(key).is_some(), "{key} missing");
    }
}

#[test]
fn symmetrize_zero_field_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let field = FieldSample::new(2.0, vec![0.0; 6], vec![0.0; 6]).unwrap();
    let input = write_field(dir.path(), "zero.json", &field);
    let out = hardylab(&["symmetrize", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let report = &lines(&out)[0];
    assert_eq!(report["pass"], true);
    assert_eq!(report["notes"], "degenerate");
}

#[test]
fn symmetrize_reports_parse_errors_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"total_measure\": 1.0,\n  \"n\": 2,\n  \"u\": [1.0, oops]\n}\n").unwrap();
    let out = hardylab(&["symmetrize", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4, column"), "{err}");

    let missing = hardylab(&["symmetrize", "--input", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}
