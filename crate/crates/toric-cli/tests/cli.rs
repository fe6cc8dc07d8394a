//! Black-box tests of the `toric` binary: schemas, exit codes, determinism.

use std::process::{Command, Output};

fn toric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = toric(args);
    assert!(out.status.success(), "{:?}", out);
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn weights_prints_cf_and_expansion() {
    assert_eq!(
        stdout(&["weights", "22/9"]),
        "z,cf,weights\n22/9,[2;2,4],9 9 4 4 1 1 1 1\n"
    );
}

#[test]
fn capacities_csv_matches_ellipsoid() {
    let got = stdout(&["capacities", "--tuple", "2:1,1", "--K", "6"]);
    assert_eq!(got, "k,c_k\n0,0\n1,1\n2,2\n3,2\n4,3\n5,3\n6,4\n");
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "embed-fn", "--tuple", "1:", "--zmax", "3", "--points", "5", "--K", "10", "--dmax", "3",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["accumulation", "--tuple", "2:1,1", "--K", "10", "--dmax", "3"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn staircase_report_is_all_true() {
    let text = stdout(&["staircase", "--n", "1", "--k", "4", "--verify", "all"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let verdicts = doc["verdicts"].as_object().unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.values().all(|v| v == &serde_json::json!(true)));
}

#[test]
fn ghost_requires_an_irrational() {
    let out = toric(&["ghost", "--alpha", "3/2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_distinguish_usage_and_domain_errors() {
    // Usage: neither --tuple nor --polygon.
    let out = toric(&["capacities", "--K", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // Usage: unknown flag.
    let out = toric(&["weights", "22/9", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // Domain: invalid tuple.
    let out = toric(&["capacities", "--tuple", "0:1", "--K", "3"]);
    assert_eq!(out.status.code(), Some(1));
    // Domain: unparseable rational.
    let out = toric(&["weights", "abc"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn accumulation_report_fields() {
    let text = stdout(&["accumulation", "--tuple", "2:1,1", "--K", "10", "--dmax", "3"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["a0"], serde_json::json!("3 + 2*sqrt(2)"));
    assert_eq!(doc["bound_equals_volume"], serde_json::json!(true));
    assert_eq!(doc["no_staircase_certified"], serde_json::json!(false));
}
