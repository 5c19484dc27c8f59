use std::process::{Command, Output};

use serde_json::Value;

fn arcforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcforge")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verdicts_map_to_exit_codes() {
    let pass = arcforge(&["verify", "herm-complete", "--q", "2", "--r", "4"]);
    assert_eq!(pass.status.code(), Some(0));
    let rep = json(&pass);
    assert_eq!(rep["verdict"], "PASS");
    assert_eq!(rep["measured"]["is_complete"], true);
    assert_eq!(rep["expected_basis"], "stated-result");

    let open = arcforge(&["verify", "herm-complete", "--q", "2", "--r", "3"]);
    assert_eq!(open.status.code(), Some(2));
    assert_eq!(json(&open)["verdict"], "REPORT-ONLY");
}

#[test]
fn invalid_input_is_a_clean_error() {
    let out = arcforge(&["verify", "no-such-task"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown task"));
    let out = arcforge(&["verify", "herm-spectrum", "--q", "6"]);
    assert_eq!(out.status.code(), Some(3));
    let out = arcforge(&["verify", "all", "--q", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = arcforge(&["export", "arc", "--q", "2", "--input", "/nonexistent/arc.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/arc.json"));
}

#[test]
fn arc_export_is_deterministic_and_reimportable() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = arcforge(&["export", "arc", "--q", "2", "--r", "1", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&p1).unwrap();
    assert_eq!(a, std::fs::read(&p2).unwrap());
    let doc: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), 9);
    assert_eq!(doc["family"], "hermitian");

    let spec = arcforge(&["export", "spectrum", "--input", p1.to_str().unwrap()]);
    assert!(spec.status.success());
    let s = json(&spec);
    assert_eq!(s["spectrum"]["3"], 12);
    assert_eq!(s["is_complete"], true);
}

#[test]
fn census_csv_has_one_row_per_field_element() {
    let out = arcforge(&["export", "census", "--family", "bks-line", "--q", "3", "--field-order", "81"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,outcome,pattern"));
    assert_eq!(lines.count(), 81);
}

#[test]
fn thread_count_does_not_change_reports() {
    let one = arcforge(&["--threads", "1", "verify", "census-agl", "--q", "3"]);
    let four = arcforge(&["--threads", "4", "verify", "census-agl", "--q", "3"]);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.status.code(), four.status.code());
}

#[test]
fn code_matrix_and_parameters() {
    let m = arcforge(&["export", "code", "--q", "2"]);
    assert!(m.status.success());
    let text = String::from_utf8(m.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.split(' ').count() == 9));
    let p = arcforge(&["export", "code", "--q", "2", "--format", "json"]);
    let v = json(&p);
    assert_eq!((v["k"].as_u64(), v["dim"].as_u64(), v["d"].as_u64()), (Some(9), Some(3), Some(6)));
}

#[test]
fn genus_export_formats() {
    let t = arcforge(&["export", "genus", "--q", "5"]);
    assert!(String::from_utf8(t.stdout).unwrap().starts_with("hermitian_offcurve"));
    let j = arcforge(&["export", "genus", "--family", "bks_general_distinct", "--q", "5", "--format", "json"]);
    let v = json(&j);
    assert_eq!(v["genus"], "19");
    assert_eq!(v["min_r"], 5);
}
