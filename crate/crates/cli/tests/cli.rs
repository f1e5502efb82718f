use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");

fn galdef(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galdef"))
        .current_dir(dir)
        .env_remove("GALDEF_DATA_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn recipe_report_has_uniform_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out = galdef(dir.path(), &["recipe", "--ell", "5", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "recipe.json");
    for key in ["command", "params", "result", "checks", "paper_anchor", "version"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["result"]["comparison"]["lambda"], 1);
    assert_eq!(r["result"]["comparison"]["all_pairs_agree"], true);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn excluded_residue_is_invalid_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = galdef(dir.path(), &["recipe", "--ell", "5", "--q", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q^2 = 1"));
    assert!(!dir.path().join("recipe.json").exists());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(galdef(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(galdef(dir.path(), &["recipe", "--ell", "five"]).status.code(), Some(2));
}

#[test]
fn principal_series_result_is_a_single_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = galdef(dir.path(), &["--out", "ps.json", "criteria", "principal-series", "--p", "7", "--ell", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(dir.path(), "ps.json")["result"], serde_json::json!({ "nonzero": true }));
}

#[test]
fn reports_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [&["lift"][..], &["cohomology", "--module", "ad0", "--ell", "5", "--alpha", "2", "--degree", "1"][..]] {
        let mut bytes = Vec::new();
        for name in ["a.json", "b.json"] {
            let mut args = vec!["--seed", "17", "--out", name];
            args.extend_from_slice(cmd);
            let out = galdef(dir.path(), &args);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            bytes.push(std::fs::read(dir.path().join(name)).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "{cmd:?}");
    }
}

#[test]
fn congruence_scan_reads_data_dir_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let missing = galdef(dir.path(), &["congruence", "--form", "11a"]);
    assert_eq!(missing.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_galdef"))
        .current_dir(dir.path())
        .env("GALDEF_DATA_DIR", DATA)
        .args(["congruence", "--form", "11a"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "congruence.json");
    assert_eq!(r["result"]["strict_congruence_primes"], serde_json::json!([7]));
}

#[test]
fn malformed_data_file_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let out = galdef(dir.path(), &["congruence", "--form", "11a", "--data", "bad.json"]);
    assert_eq!(out.status.code(), Some(3));
}
