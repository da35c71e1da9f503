//! The `masep` binary: artifacts, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn masep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_masep")).args(args).env_remove("MASEP_CAPACITY").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("masep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn spectrum_of_a_two_species_sector() {
    let out = masep(&["spectrum", "--L", "4", "--sector", "2,2", "--p", "2/3", "--q", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 6);
    let ev: Vec<(f64, f64, u64)> = serde_json::from_value(v["eigenvalues"].clone()).unwrap();
    let expected = [(0.0, 1), (-1.0, 2), (-4.0 / 3.0, 1), (-5.0 / 3.0, 1), (-3.0, 1)];
    assert_eq!(ev.len(), expected.len());
    for (e, m) in expected {
        assert!(ev.iter().any(|&(re, im, k)| (re - e).abs() < 1e-9 && im.abs() < 1e-9 && k == m), "{e}");
    }
}

#[test]
fn trivial_ring_and_csv() {
    let out = masep(&["spectrum", "--L", "1", "--sector", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "re,im,multiplicity\n0,0,1\n");
}

#[test]
fn next_leading_pairs_are_appended() {
    let v = json(&masep(&["spectrum", "--L", "7", "--sector", "2,1,3,1", "--p", "0.8", "--q", "0.2", "--next-leading"]));
    assert_eq!(v["count"], 420);
    assert_eq!(v["next_leading"].as_array().unwrap().len(), 3);
}

#[test]
fn matrix_export_is_exact() {
    let path = scratch("h.json");
    let out = masep(&["spectrum", "--sector", "1,1", "--p", "2/3", "--q", "1/3", "--matrix-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["rows"], 2);
    let entries: Vec<(usize, usize, String)> = serde_json::from_value(m["entries"].clone()).unwrap();
    assert!(entries.iter().any(|e| e.2 == "-1"));
    assert!(entries.iter().all(|e| !e.2.contains('.')), "{entries:?}");
}

#[test]
fn exit_codes() {
    assert_eq!(masep(&["spectrum", "--L", "4", "--sector", "2,3"]).status.code(), Some(1));
    assert_eq!(masep(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(masep(&["--help"]).status.code(), Some(0));
    assert_eq!(masep(&["--capacity", "10", "spectrum", "--sector", "2,1,3,1"]).status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_masep")).args(["spectrum", "--sector", "2,1,3,1"]).env("MASEP_CAPACITY", "50").output().unwrap();
    assert_eq!(env.status.code(), Some(2));
    assert_eq!(masep(&["verify", "--suite", "bethe-fixtures", "--fixtures", "/definitely/not/here.json"]).status.code(), Some(3));
    assert_eq!(masep(&["bethe", "verify", "--roots", "/definitely/not/here.json"]).status.code(), Some(3));
    assert_eq!(masep(&["scan", "--Lmin", "64", "--Lmax", "32"]).status.code(), Some(1));
    assert_eq!(masep(&["--capacity", "7000", "hasse", "--L", "3"]).status.code(), Some(1));
    assert_eq!(masep(&["--capacity", "7000", "--allow-large", "hasse", "--L", "3"]).status.code(), Some(0));
}

#[test]
fn failing_check_exits_four() {
    let path = scratch("bad_roots.json");
    std::fs::write(&path, r#"{"L":4,"p":0.666667,"q":0.333333,"nesting":[1,2],"counts":[3,1],"levels":[[[0.3,0.1]]]}"#).unwrap();
    let out = masep(&["bethe", "verify", "--roots", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "--suite", "duality", "--L", "4", "--p", "0.8", "--q", "0.2"][..],
        &["verify", "--suite", "bethe-fixtures", "--fixtures", "appendixC.json"],
        &["verify", "--suite", "inclusion", "--L", "5"],
        &["verify", "--suite", "gap-conjecture", "--L", "5", "--p", "0.8", "--q", "0.2"],
        &["verify", "--suite", "ybe", "--L", "3", "--p", "3/7", "--q", "1/5"],
        &["verify", "--suite", "stationary", "--L", "4"],
        &["verify", "--suite", "structural", "--L", "4", "--p", "5/9", "--q", "2/7"],
    ] {
        let out = masep(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["passed"], true);
        assert!(!v["assertions"].as_array().unwrap().is_empty());
    }
    let v = json(&masep(&["verify", "--suite", "inclusion", "--L", "5"]));
    assert_eq!(v["assertions"].as_array().unwrap().len(), 65);
}

#[test]
fn bethe_commands() {
    let out = masep(&["bethe", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&masep(&["bethe", "solve1", "--L", "12", "--n", "6", "--p", "0.8", "--q", "0.2"]));
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    assert!(v["energy"][0].as_f64().unwrap() < 0.0);
    let bad = masep(&["bethe", "solve1", "--L", "12", "--n", "6", "--qn", "a,b"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn scan_emits_samples_and_fit() {
    let fit = scratch("fit.json");
    let out = masep(&["scan", "--Lmin", "16", "--Lmax", "256", "--rho", "0.5", "--p", "1/2", "--q", "1/2", "--format", "csv", "--fit-out", fit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8_lossy(&out.stdout);
    assert_eq!(csv.lines().next(), Some("L,rho,p,q,reE,imE,method"));
    assert_eq!(csv.lines().count(), 6);
    let f: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    assert!((f["z"].as_f64().unwrap() - 2.0).abs() < 0.02, "{f}");
    let warn = masep(&["scan", "--Lmin", "6", "--Lmax", "96", "--rho", "0.25"]);
    assert_eq!(warn.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&warn.stderr).contains("L = 6"));
}

#[test]
fn hasse_and_stationary() {
    let v = json(&masep(&["hasse", "--L", "4"]));
    assert_eq!(v["sectors"].as_array().unwrap().len(), 8);
    assert_eq!(v["edges"].as_array().unwrap().len(), 12);
    let v = json(&masep(&["stationary", "--sector", "1,1,1", "--p", "2/3", "--q", "1/3"]));
    let probs: Vec<f64> = serde_json::from_value(v["probabilities"].clone()).unwrap();
    let oracle = [5.0, 4.0, 4.0, 5.0, 5.0, 4.0].map(|x| x / 27.0);
    for (a, b) in probs.iter().zip(oracle) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn identical_runs_write_identical_files() {
    let (a, b) = (scratch("run_a.json"), scratch("run_b.json"));
    for path in [&a, &b] {
        let out = masep(&["--seed", "9", "--output", path.to_str().unwrap(), "verify", "--suite", "ybe", "--L", "3"]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (c, d) = (scratch("dual_a.csv"), scratch("dual_b.csv"));
    for (path, w) in [(&c, "1"), (&d, "3")] {
        masep(&["--workers", w, "--format", "csv", "--output", path.to_str().unwrap(), "duality", "--L", "5"]);
    }
    assert_eq!(std::fs::read(&c).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn genuine_routes_agree() {
    let out = masep(&["genuine", "--L", "5", "--sector", "1,2,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["genuine_dimension"], "9");
    assert_eq!(v["methods_agree"], true);
}
