use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn adelic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adelic"))
        .args(args)
        .env_remove("ADELIC_SEED")
        .env_remove("ADELIC_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adelic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn gallery_file(args: &[&str], name: &str) -> PathBuf {
    let p = tmp(name);
    let mut full = vec!["gallery"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let o = adelic(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn pnl_queries() {
    let o = adelic(&["pnl", "2", "4", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "12 12 OK");
    assert_eq!(stdout(&adelic(&["pnl", "1", "100"])), "1");
    assert_eq!(stdout(&adelic(&["pnl", "3", "2", "--factored"])), "2 = 2^1");
    assert_eq!(stdout(&adelic(&["pnl", "2", "4", "--method", "both"])), "12\n12");
}

#[test]
fn pnl_cap_is_an_input_error() {
    let o = adelic(&["pnl", "12", "40", "--method", "brute"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn pnl_grid_csv() {
    let o = adelic(&["pnl-grid", "--n-max", "2", "--l-max", "4", "--format", "csv"]);
    let s = stdout(&o);
    assert!(s.starts_with("n,l,p\n"));
    assert!(s.contains("2,4,12"));
}

#[test]
fn bundle_values_on_gallery_files() {
    let eq = gallery_file(&["eq", "1/4"], "eq.json");
    let o = adelic(&["bundle", "slope", eq.to_str().unwrap()]);
    assert_eq!(stdout(&o), r#"{"e":"0","logs":{"5":"-1/8"}}"#);

    let sq = tmp("eq2.json");
    let o = adelic(&["bundle", "tensor", eq.to_str().unwrap(), eq.to_str().unwrap()]);
    std::fs::write(&sq, o.stdout).unwrap();
    let o = adelic(&["bundle", "height", sq.to_str().unwrap(), "--vector", "1,0,0,-1"]);
    assert_eq!(stdout(&o), r#"{"e":"0","logs":{"2":"1/2","5":"1/4"}}"#);

    let a3 = gallery_file(&["an", "3"], "a3.json");
    let o = adelic(&["bundle", "minsearch", a3.to_str().unwrap(), "--radius", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], serde_json::json!({"e": "0", "logs": {"2": "1/2"}}));
    assert_eq!(v["witness"], serde_json::json!([1, 0, 0]));
}

#[test]
fn gallery_output_round_trips() {
    for (args, name) in [
        (vec!["standard", "3"], "std.json"),
        (vec!["an", "4"], "a4.json"),
        (vec!["eq", "1/3"], "e13.json"),
        (vec!["mh", "3"], "mh3.json"),
    ] {
        let p = gallery_file(&args, name);
        let original = std::fs::read_to_string(&p).unwrap();
        // dual twice is the identity on the stored data
        let d = tmp(&format!("dual-{name}"));
        std::fs::write(&d, adelic(&["bundle", "dual", p.to_str().unwrap()]).stdout).unwrap();
        let back = adelic(&["bundle", "dual", d.to_str().unwrap()]);
        assert!(back.status.success());
        assert_eq!(stdout(&back), original.trim(), "{name}");
    }
}

#[test]
fn bad_bundle_file() {
    let p = tmp("bad.json");
    std::fs::write(&p, r#"{"dim": 2, "gram": [[1, 2], [2, 1]]}"#).unwrap();
    assert_eq!(adelic(&["bundle", "slope", p.to_str().unwrap()]).status.code(), Some(2));
    let missing = tmp("missing.json");
    assert_eq!(adelic(&["bundle", "slope", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn verify_selected_groups() {
    let o = adelic(&["verify", "--only", "ce,minima", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| {
        let id = e["statement_id"].as_str().unwrap();
        id.starts_with("ce.") || id.starts_with("minima.")
    }));
    assert_eq!(v["header"]["seed"], 42);
    // identical invocations give identical bytes
    let again = adelic(&["verify", "--only", "ce,minima", "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn verify_radius_zero_is_undecided_not_failed() {
    let o = adelic(&["verify", "--only", "minima", "--radius", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["entries"].as_array().unwrap().iter().any(|e| e["verdict"] == "undecided"));
}

#[test]
fn verify_reads_env_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_adelic"))
        .args(["verify", "--only", "ce"])
        .env("ADELIC_FORMAT", "csv")
        .env("ADELIC_SEED", "9")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("statement_id,instance"));
}

#[test]
fn verify_errors() {
    assert_eq!(adelic(&["verify", "--only", "nope"]).status.code(), Some(2));
    assert_eq!(adelic(&["verify", "--precision-bits", "9000"]).status.code(), Some(2));
    assert_eq!(adelic(&["verify", "--only", "ce", "--out", "/nonexistent/dir/r.md"]).status.code(), Some(3));
}
