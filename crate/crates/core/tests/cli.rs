//! End-to-end runs of the `votedim` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn votedim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_votedim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn certs() -> String {
    format!("{}/../../certs/eu2018_noUK_8.txt", env!("CARGO_MANIFEST_DIR"))
}

const TOY: &str = "rank,country,population
1,Alpha,400
2,Beta,300
3,Gamma,150
4,Delta,80
5,Epsilon,40
6,Zeta,30
total,Total population,1000
";

#[test]
fn analyze_text_reports_bound() {
    let o = votedim(&["analyze", "--data", "builtin:2014"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("upper bound: 24"));
    assert!(text.contains("D: 10 coalitions"));
    assert!(text.contains("ceiling 33349058"));
}

#[test]
fn analyze_json_is_well_formed() {
    let o = votedim(&["analyze", "--data", "builtin:2014", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["bound"], 24);
    assert_eq!(doc["members"], 28);
    assert_eq!(doc["method"], "theorem1");
    assert_eq!(doc["d"]["count"], 10);
    assert_eq!(doc["u"]["scaled"], 666_981_151u64);
    assert_eq!(doc["u"]["exact"], "666981151/20");
    assert_eq!(doc["t"].as_array().unwrap().len(), 22);
    assert_eq!(doc["f"].as_array().unwrap().len(), 1);
    assert_eq!(doc["games"].as_array().unwrap().len(), 24);
    assert_eq!(doc["games"][0]["quota"], 16);
    assert!(doc["verification"].is_null());
}

#[test]
fn unknown_dataset_is_an_input_error() {
    let o = votedim(&["analyze", "--data", "builtin:1999"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1999"));
    let o = votedim(&["analyze", "--data", "builtin:2014", "--exclude", "Atlantis"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_arguments_are_input_errors() {
    assert_eq!(votedim(&["analyze"]).status.code(), Some(2));
    assert_eq!(votedim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(votedim(&["--help"]).status.code(), Some(0));
}

#[test]
fn swapped_roles_are_inapplicable() {
    let o = votedim(&["analyze", "--data", "builtin:2014", "--swap-roles"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("inapplicable"));
}

#[test]
fn analyze_without_the_largest_member() {
    let o = votedim(&[
        "analyze",
        "--data",
        "builtin:2018",
        "--exclude",
        "united kingdom",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["members"], 27);
    assert_eq!(doc["rule"]["member_quota"], 15);
    assert_eq!(doc["rule"]["blocking_quota"], 24);
    assert!(!doc["ranks"].as_array().unwrap().contains(&Value::from(3)));
    assert_eq!(doc["bound"], 1364);
}

#[test]
fn verify_toy_table() {
    let csv = temp_file(TOY);
    let path = csv.path().to_str().unwrap();
    let o = votedim(&["verify", "--data", path, "--blocking-minority", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["verification"]["passed"], true);
    assert_eq!(doc["verification"]["coalitions_checked"], 64);
}

#[test]
fn malformed_csv_is_an_input_error() {
    let csv = temp_file("rank,country,population\n1,Alpha,400\n2,Beta,x\n");
    let o = votedim(&["analyze", "--data", csv.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let csv = temp_file("rank,country,population\n1,Alpha,100\n2,Beta,300\n3,Gamma,50\n4,Delta,20\n");
    let path = csv.path().to_str().unwrap();
    let o = votedim(&["analyze", "--data", path, "--blocking-minority", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = votedim(&[
        "analyze",
        "--data",
        path,
        "--blocking-minority",
        "2",
        "--allow-unordered",
    ]);
    assert_ne!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn corrupted_slack_fails_verification() {
    let o = votedim(&["verify", "--data", "builtin:2014", "--corrupt-u-offset=-1", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["verification"]["passed"], false);
    assert_eq!(doc["verification"]["intersection_wins"], false);
    let witness: Vec<u64> = serde_json::from_value(doc["verification"]["counterexample"].clone())
        .unwrap();
    assert_eq!(witness, (4..=28).collect::<Vec<_>>());
}

#[test]
fn lower_bound_certificate_file() {
    let certs = certs();
    let o = votedim(&[
        "lower-bound",
        "verify",
        "--data",
        "builtin:2018",
        "--exclude",
        "United Kingdom",
        "--coalitions",
        &certs,
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["lower_bound"], 8);
    assert_eq!(doc["certified_pairs"], 28);
}

#[test]
fn lower_bound_single_coalition() {
    let f = temp_file("# one losing coalition\n1,2\n");
    let o = votedim(&[
        "lower-bound",
        "verify",
        "--data",
        "builtin:2014",
        "--coalitions",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certified lower bound: 1"));
}

#[test]
fn lower_bound_rejects_winning_coalitions() {
    let f = temp_file("1,2\n1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17\n");
    let o = votedim(&[
        "lower-bound",
        "verify",
        "--data",
        "builtin:2014",
        "--coalitions",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn lower_bound_rejects_bad_ranks() {
    for bad in ["1,29\n", "1,x\n", "\n", "1,2\n2,1\n"] {
        let f = temp_file(bad);
        let o = votedim(&[
            "lower-bound",
            "verify",
            "--data",
            "builtin:2014",
            "--coalitions",
            f.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(2), "{bad:?}: {}", stderr(&o));
    }
    // The absent member's rank is not accepted.
    let f = temp_file("1,3\n");
    let o = votedim(&[
        "lower-bound",
        "verify",
        "--data",
        "builtin:2018",
        "--exclude",
        "United Kingdom",
        "--coalitions",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lower_bound_search_certifies_its_output() {
    let o = votedim(&[
        "lower-bound",
        "search",
        "--data",
        "builtin:2014",
        "--budget",
        "40",
        "--seed",
        "3",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let bound = doc["lower_bound"].as_u64().unwrap();
    let k = doc["coalitions"].as_array().unwrap().len() as u64;
    assert_eq!(bound, k);
    assert_eq!(doc["certified_pairs"], k * (k - 1) / 2);
}
