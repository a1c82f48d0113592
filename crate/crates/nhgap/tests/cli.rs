use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn nhgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhgap")).args(args).env("NHGAP_LOG", "error").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn linegap_fixture() {
    let f = fixture("diag2.cmat");
    let out = nhgap(&["linegap", "--input", f.to_str().unwrap(), "--eps", "0.01", "--backend", "exact", "--output", "json", "--oracle-check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert!((v["estimate_im"].as_f64().unwrap() - 0.3).abs() <= 0.01);
    assert_eq!(v["oracle_check"]["pass"], true);
    for key in ["estimate_re", "estimate_im", "bracket", "fqed_queries", "iterations", "modeled_cost"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn filtercheck_emits_certified_csv() {
    let out = nhgap(&["filtercheck", "--eps-th", "0.1", "--delta", "0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value,branch,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 2048);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn malformed_matrix_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cmat");
    std::fs::write(&p, "cmatrix 2\n1 2\n3 x\n").unwrap();
    let out = nhgap(&["linegap", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn schema_errors_exit_3() {
    let f = fixture("unknown_key.json");
    assert_eq!(nhgap(&["vectorize", "--input", f.to_str().unwrap()]).status.code(), Some(3));
    let d = fixture("diag2.cmat");
    assert_eq!(nhgap(&["linegap", "--input", d.to_str().unwrap(), "--eps", "1.5"]).status.code(), Some(3));
    assert_eq!(nhgap(&["linegap", "--bogus"]).status.code(), Some(3));
}

#[test]
fn promise_violation_exit_2() {
    let f = fixture("unitary.json");
    assert_eq!(nhgap(&["liouvgap", "--input", f.to_str().unwrap()]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("real.cmat");
    std::fs::write(&p, "cmatrix 2\n0.5 0\n0 -0.2\n").unwrap();
    assert_eq!(nhgap(&["linegap", "--input", p.to_str().unwrap(), "--eps", "0.05"]).status.code(), Some(2));
}

#[test]
fn trace_csv_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let f = fixture("dense2.cmat");
    let out = nhgap(&["pointgap", "--input", f.to_str().unwrap(), "--eps", "0.02", "--output", "json", "--trace", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut rd = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["index", "region_lo", "region_hi", "covering_size", "verdict", "cumulative_queries"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len() as u64, v["iterations"].as_u64().unwrap());
    let width = |r: &csv::StringRecord| r[2].parse::<f64>().unwrap() - r[1].parse::<f64>().unwrap();
    let queries = |r: &csv::StringRecord| r[5].parse::<u64>().unwrap();
    for w in rows.windows(2) {
        assert!(width(&w[1]) <= width(&w[0]) + 1e-12);
        assert!(queries(&w[1]) >= queries(&w[0]));
    }
}

#[test]
fn reports_are_reproducible() {
    let f = fixture("dense2.cmat");
    let base = ["linegap", "--input", f.to_str().unwrap(), "--eps", "0.02", "--backend", "filtered", "--shots", "200", "--fqed-delta", "0.01", "--seed", "7", "--output", "json"];
    let a = nhgap(&base);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = nhgap(&base);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = base.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(nhgap(&threaded).stdout, a.stdout);
}

#[test]
fn oracle_and_markov_commands() {
    let f = fixture("chain2.cmat");
    let out = nhgap(&["oracle", "--input", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["abs_gap"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let out = nhgap(&["markovgap", "--input", f.to_str().unwrap(), "--delta-promise", "0.3", "--output", "json", "--oracle-check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() <= 0.01);
    assert_eq!(v["oracle_check"]["pass"], true);
}

#[test]
fn liouvgap_dephasing() {
    let f = fixture("dephasing.json");
    let out = nhgap(&["liouvgap", "--input", f.to_str().unwrap(), "--output", "json", "--oracle-check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() <= 0.01);
    assert_eq!(v["modeled_cost"]["gates_per_query"], 4.0);
}
