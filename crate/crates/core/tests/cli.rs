use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_clifford-forge");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(BIN).args(args).env(key, value).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn construct(dir: &Path, m: usize, r: usize, d: usize) -> PathBuf {
    let path = dir.join(format!("m{m}r{r}d{d}.json"));
    let out = run(&[
        "construct",
        "--m",
        &m.to_string(),
        "--r",
        &r.to_string(),
        "--d",
        &d.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn construct_writes_the_example_systems() {
    let dir = tempfile::tempdir().unwrap();
    for r in [0, 4] {
        let path = construct(dir.path(), 4, r, 1);
        let body: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(body["l"], 8);
        assert_eq!(body["s"], 8);
        assert_eq!(body["operators"].as_array().unwrap().len(), 4);
        assert!(body["trace"].as_array().is_some_and(|t| !t.is_empty()));
    }
}

#[test]
fn construct_rejects_bad_ranges() {
    assert_eq!(run(&["construct", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--m", "4", "--r", "5"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "--m", "4", "--d", "0"]).status.code(), Some(2));
    assert_eq!(run(&["construct"]).status.code(), Some(2));
}

#[test]
fn analyze_reports_case_and_components() {
    let dir = tempfile::tempdir().unwrap();
    for (r, case, comps) in [(0, "a", 2), (4, "d3", 1)] {
        let path = construct(dir.path(), 4, r, 1);
        let out = run(&["analyze", "--in", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let body = json_of(&out);
        assert_eq!(body["case"], case);
        assert_eq!(body["components"].as_array().unwrap().len(), comps);
        assert_eq!(body["passed"], true);
    }
}

#[test]
fn tampered_file_fails_with_the_first_relation() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), 4, 0, 1);
    let mut body: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let sign = &mut body["operators"][1]["data"]["sign"][0];
    *sign = Value::from(-sign.as_i64().unwrap());
    let bad = dir.path().join("tampered.json");
    fs::write(&bad, serde_json::to_string(&body).unwrap()).unwrap();
    let out = run(&["analyze", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["status"], "failure");
    assert!(report["first_failure"]["check"].is_string());
    assert_eq!(run(&["verify", "--in", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--in", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn malformed_input_is_a_user_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"m\": 4}").unwrap();
    assert_eq!(run(&["analyze", "--in", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["witness", "--in", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn witness_per_component_and_unmet_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    for (r, comps) in [(0, 2), (4, 1)] {
        let path = construct(dir.path(), 4, r, 1);
        let out = run(&["witness", "--in", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let body = json_of(&out);
        let list = body["components"].as_array().unwrap();
        assert_eq!(list.len(), comps);
        for c in list {
            assert_eq!(c["n_plus_witness"]["passed"], true);
            assert_eq!(c["inhomogeneity_witness"]["passed"], true);
            for key in ["in_m_plus", "stratum", "not_in_eigenspaces", "not_in_n_plus"] {
                assert_eq!(c["inhomogeneity_witness"]["checks"][key], true, "{key}");
            }
        }
    }
    let unmet = construct(dir.path(), 4, 2, 1);
    let out = run(&["witness", "--in", unmet.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["status"], "hypothesis_unmet");
    let reached = construct(dir.path(), 4, 2, 2);
    assert_eq!(run(&["witness", "--in", reached.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn sample_levels() {
    let dir = tempfile::tempdir().unwrap();
    let zero = construct(dir.path(), 4, 0, 1);
    let out = run(&["sample", "--in", zero.to_str().unwrap(), "--c", "0", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["max_f_residual"].as_f64().unwrap() < 1e-9);

    let full = construct(dir.path(), 4, 4, 1);
    let c = 4f64.cosh().to_string();
    let out = run(&["sample", "--in", full.to_str().unwrap(), "--c", &c, "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let body = json_of(&out);
    assert!(body["max_f_residual"].as_f64().unwrap() < 1e-8);
    assert!(body["max_normal_residual"].as_f64().unwrap() < 1e-8);

    let out = run(&["sample", "--in", zero.to_str().unwrap(), "--c", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sample", "--in", zero.to_str().unwrap(), "--c", "-0.5", "--count", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), 4, 4, 1);
    let args = ["sample", "--in", path.to_str().unwrap(), "--c", "3", "--count", "16", "--seed", "9"];
    let one = run_env(&args, "CLIFFORD_FORGE_THREADS", "1");
    let four = run_env(&args, "CLIFFORD_FORGE_THREADS", "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let a = run(&["analyze", "--in", path.to_str().unwrap()]);
    let b = run(&["analyze", "--in", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let out_path = dir.path().join("example.json");
    let e = run(&["example", "m4r0", "--count", "10", "--out", out_path.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(0));
    let f = run(&["example", "m4r0", "--count", "10"]);
    assert_eq!(fs::read(&out_path).unwrap(), f.stdout);
}

#[test]
fn examples_run_end_to_end() {
    for name in ["m4r0", "m4r4"] {
        let out = run(&["example", name, "--count", "30"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json_of(&out)["passed"], true);
    }
    assert_eq!(run(&["example", "m4r2"]).status.code(), Some(2));
}
