use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaussmap"));
    cmd.env_remove("GAUSSMAP_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Report text with the timestamp line removed.
fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn certify_sphere_matches_golden() {
    let out = run(&["certify", "--kind", "1", "--a", "-1", "--b", "-1", "--c", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let lambda = &v["results"]["certificate"]["lambda"];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(lambda[i][j], if i == j { "1/2" } else { "0" });
        }
    }
    let expected = fs::read_to_string(golden("certify_sphere_c4.json")).unwrap();
    assert_eq!(without_timestamp(&text), without_timestamp(&expected));
}

#[test]
fn certify_infeasible_has_contradiction() {
    let out = run(&["certify", "--kind", "2", "--a", "1", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cert = &v["results"]["certificate"];
    assert_eq!(cert["outcome"], "infeasible");
    assert!(cert["contradiction"]["derived_equation"].as_str().unwrap().starts_with("0 = "));
    assert_eq!(v["results"]["certificate_checked"], true);
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let dir = tempdir().unwrap();
    for sub in ["one", "two"] {
        let status = bin()
            .env("GAUSSMAP_OUT_DIR", dir.path().join(sub))
            .args(["fit", "--surface", "quadric2", "--samples", "40", "--seed", "9"])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read_to_string(dir.path().join("one/fit.json")).unwrap();
    let b = fs::read_to_string(dir.path().join("two/fit.json")).unwrap();
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["inputs"]["tolerances"]["satisfy"], 1e-6);
    assert!(v["meta"]["timestamp"].is_u64());
}

#[test]
fn verify_catenoid_is_minimal() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = run(&["verify", "--surface", "catenoid", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&path);
    let row = v["results"].as_object().unwrap().values().next().unwrap().clone();
    assert!(row["max_res_x"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["inputs"]["tolerances"]["identity"], 1e-8);
}

#[test]
fn verify_reads_surface_files() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("s.conf");
    fs::write(&file, "name = sphere chart\nkind = quadric1\na = -1\nb = -1\nc = 4\n").unwrap();
    let out = run(&["verify", "--surface", file.to_str().unwrap(), "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["sphere chart"]["pass"], true);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("bad.conf");
    fs::write(&file, "kind = paraboloid\n").unwrap();
    assert_eq!(run(&["verify", "--surface", file.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--kind", "1", "--a", "1/0", "--b", "1", "--c", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["classify", "--family", "quadric1", "--grid", "a=0;1,b=1,c=1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["fit"]).status.code(), Some(2));
}

#[test]
fn tight_tolerance_reports_check_failure() {
    let out = run(&["verify", "--surface", "sphere", "--samples", "20", "--tol-identity", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_quadric2_csv_all_fail() {
    let out = run(&[
        "classify", "--family", "quadric2", "--grid", "a=0.5:2:4,b=0.5:2:4", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let verdict = headers.iter().position(|h| h == "verdict").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| &r[verdict] == "fails"));
}

#[test]
fn cross_check_passes_on_defaults() {
    let out = run(&["cross-check", "--numeric-points", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["kind1"]["fg_audit"]["slice"]["full_matches"], true);
    assert_eq!(v["results"]["kind2"]["pass"], true);
}
