use std::process::{Command, Output};

use serde_json::Value;

fn ndcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ndcomm"))
        .args(args)
        .env_remove("NDCOMM_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_report_embeds_config_and_version() {
    let out = ndcomm(&[
        "verify",
        "--protocol",
        "quantum-heq",
        "--k",
        "2",
        "--kprime",
        "1",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.ends_with(b"}\n"));
    let v = json(&out);
    assert_eq!(v["tool"], "ndcomm");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["protocol"], "quantum-heq");
    assert_eq!(v["failures"], 0);
    assert!(v.get("duration_ms").is_none());
    assert_eq!(v["result"]["max_cost"], 7);
}

#[test]
fn timing_flag_adds_duration() {
    let out = ndcomm(&["--timing", "verify", "--protocol", "neq", "--n", "2"]);
    assert!(out.status.success());
    assert!(json(&out)["duration_ms"].is_u64());
}

#[test]
fn sampling_requires_seed() {
    let out = ndcomm(&[
        "verify",
        "--protocol",
        "quantum-heq",
        "--k",
        "3",
        "--kprime",
        "3",
        "--mode",
        "sample",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    let out = ndcomm(&["clique", "--k", "3", "--kprime", "3", "--mode", "heuristic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_violations_fail_fast() {
    let out = ndcomm(&[
        "verify",
        "--protocol",
        "quantum-heq",
        "--k",
        "3",
        "--kprime",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    let out = ndcomm(&["clique", "--k", "3", "--kprime", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ndcomm(&["bounds", "--k", "3..11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cover_csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cover.csv");
    let out = ndcomm(&[
        "cover",
        "--function",
        "heq",
        "--k",
        "2",
        "--kprime",
        "1",
        "--target",
        "diagonal",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,alice,bob"));
    assert_eq!(lines.count(), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("N >= ceil(log2 4) = 2"));
}

#[test]
fn cover_of_other_functions() {
    let v = json(&ndcomm(&["cover", "--function", "neq", "--n", "2"]));
    assert_eq!(v["result"]["size"], 4);
    let v = json(&ndcomm(&["cover", "--function", "const", "--size", "5"]));
    assert_eq!(v["result"]["size"], 1);
    assert_eq!(v["result"]["communication_bound"], 0);
}

#[test]
fn clique_reports_derived_bound_only_when_exact() {
    let v = json(&ndcomm(&["clique", "--k", "2", "--kprime", "1"]));
    assert_eq!(v["result"]["size"], 2);
    assert_eq!(v["result"]["diagonal_cover_lower_bound"], "4");
    let v = json(&ndcomm(&[
        "clique",
        "--k",
        "3",
        "--kprime",
        "3",
        "--mode",
        "heuristic",
        "--seed",
        "3",
        "--tries",
        "500",
    ]));
    assert_eq!(v["result"]["exact"], false);
    assert!(v["result"].get("diagonal_cover_lower_bound").is_none());
}

#[test]
fn polycheck_default_certifies_a_maximum_set() {
    let v = json(&ndcomm(&["polycheck", "--k", "2", "--kprime", "2"]));
    assert_eq!(v["failures"], 0);
    assert_eq!(v["result"]["sets_checked"], 1);
    assert_eq!(v["result"]["largest_set"], 6);
}

#[test]
fn threads_env_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_ndcomm"))
        .args(["verify", "--protocol", "neq", "--n", "3"])
        .env("NDCOMM_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["failures"], 0);
    let out = ndcomm(&["--threads", "0", "verify", "--protocol", "neq", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_ranges_are_rejected() {
    assert_eq!(ndcomm(&["bounds", "--k", "8..3"]).status.code(), Some(2));
    assert_eq!(ndcomm(&["bounds", "--k", "x"]).status.code(), Some(2));
}
