use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE: &str = r#"{"n":4,"c1":"(1 4 2 3)","c2":"(1 2 3 4)","a":[2]}"#;
const PRIME: &str = "fp:2305843009213693951";

fn ybx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ybx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ybx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn check_aybe_emits_one_report() {
    let f = write_temp("ex.json", EXAMPLE);
    let out = ybx(&[
        "check-aybe",
        "--abd",
        f.to_str().unwrap(),
        "--points",
        "25",
        "--seed",
        "7",
        "--field",
        PRIME,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["check"], "aybe");
    assert_eq!(v["points"], 25);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);
}

#[test]
fn output_is_deterministic() {
    let f = write_temp("det.json", EXAMPLE);
    let args = ["check-skew", "--abd", f.to_str().unwrap(), "--seed", "3"];
    assert_eq!(ybx(&args).stdout, ybx(&args).stdout);
}

#[test]
fn mutation_fails_with_exit_one() {
    let f = write_temp("mut.json", EXAMPLE);
    let out = ybx(&[
        "check-aybe",
        "--abd",
        f.to_str().unwrap(),
        "--mutate",
        "one-coefficient",
        "--points",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["failures"], 5);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(
        ybx(&["check-aybe", "--abd", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ybx(&["--field", "fp:7", "surface", "--c1", "(1)", "--c2", "(1)"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ybx(&["surface", "--c1", "(1 2", "--c2", "(1 2)"])
            .status
            .code(),
        Some(2)
    );
    let invalid = ybx(&["cybe", "--c1", "(1 2 3)", "--c2", "(1 3)"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("not a valid structure"));
}

#[test]
fn validate_reports_violations() {
    let out = ybx(&["validate", "--c1", "(1 2)", "--c2", "(1 2)", "--a", "1,2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["kind"], "not_proper_subset");

    let out = ybx(&["validate", "--perm", "(1 3)(2)", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["images"], serde_json::json!([2, 1, 0]));
}

#[test]
fn surface_of_the_example() {
    let f = write_temp("surf.json", EXAMPLE);
    let out = ybx(&["surface", "--abd", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["b"], 2);
    assert_eq!(v["chi"], -4);
    assert_eq!(v["genus"], 2);
    assert_eq!(v["fillable"], serde_json::json!([2]));
}

#[test]
fn build_r_for_one_square() {
    let out = ybx(&[
        "build-r", "--c1", "(1)", "--c2", "(1)", "--qu", "2", "--qv", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // 1/(4 − 1) + 1/(1 − 1/9) = 1/3 + 9/8
    assert_eq!(v["entries"][0]["c"], "35/24");

    let pole = ybx(&[
        "build-r", "--c1", "(1)", "--c2", "(1)", "--qu", "1", "--qv", "3",
    ]);
    assert_eq!(pole.status.code(), Some(2));
}

#[test]
fn hat_and_qybe_report_several_checks() {
    let f = write_temp("hat.json", EXAMPLE);
    let out = ybx(&[
        "hat",
        "--abd",
        f.to_str().unwrap(),
        "--points",
        "3",
        "--field",
        PRIME,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names, ["hat_aybe", "hat_skew", "hat_hat_flip"]);

    let out = ybx(&["qybe", "--abd", f.to_str().unwrap(), "--points", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"][1]["check"], "qybe");
}

#[test]
fn residues_and_cybe_pass() {
    let f = write_temp("res.json", EXAMPLE);
    for cmd in ["residues", "cybe"] {
        let out = ybx(&[cmd, "--abd", f.to_str().unwrap(), "--points", "3"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
    }
}

#[test]
fn massey_compare_agrees() {
    let f = write_temp("massey.json", EXAMPLE);
    let out = ybx(&[
        "massey",
        "--abd",
        f.to_str().unwrap(),
        "--point-seed",
        "7",
        "--compare",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["equal_to_r"], true);
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn novikov_default_points() {
    let out = ybx(&["novikov"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["points"].as_array().unwrap().len(), 5);
    let bad = ybx(&["novikov", "--u", "-1", "--v", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bundle_emits_its_structure() {
    let f = write_temp("b.json", r#"{"r":2,"n":1,"m":[[0],[1]],"lambda":"1/1"}"#);
    let out = ybx(&[
        "bundle",
        "--in",
        f.to_str().unwrap(),
        "--emit-abd",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["chain"], serde_json::json!([1, 2]));
    assert_eq!(v["abd"]["a"], serde_json::json!([1]));

    let g = write_temp(
        "nb.json",
        r#"{"r":4,"n":1,"m":[[0],[1],[1],[0]],"lambda":"2"}"#,
    );
    let out = ybx(&["bundle", "--in", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["simple"], false);
}

#[test]
fn isomorphism_of_relabelled_structures() {
    let f = write_temp("iso1.json", EXAMPLE);
    let g = write_temp(
        "iso2.json",
        r#"{"n":4,"c1":"(2 1 3 4)","c2":"(2 3 4 1)","a":[3]}"#,
    );
    let out = ybx(&[
        "abd-iso",
        "--abd",
        f.to_str().unwrap(),
        "--other",
        g.to_str().unwrap(),
    ]);
    assert_eq!(json(&out)["isomorphic"], true);
    let out = ybx(&["abd-iso", "--pairs", "10", "--max-n", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn small_suite_in_text() {
    let out = ybx(&[
        "suite",
        "--max-n",
        "2",
        "--points",
        "2",
        "--bundles",
        "2",
        "--field",
        PRIME,
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with("PASS"));
    assert!(!text.contains("FAIL"));
}
