//! End-to-end runs of the compiled binary: exit codes, artifact layout,
//! gate semantics, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_argshift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("{name} in {}: {e}", dir.display()))
}

#[test]
fn rigidity_emits_exactly_one_pass_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rig");
    let res = run(&["rigidity", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let table = read(&out, "table.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 10, "header plus nine grid rows");
    assert_eq!(lines[0], "u_re,u_im,defect,error_estimate,tol,pass");
    let passing: Vec<&&str> = lines[1..].iter().filter(|l| l.ends_with(",true")).collect();
    assert_eq!(passing.len(), 1, "exactly one passing row:\n{table}");
    assert!(passing[0].starts_with("0,0,"), "the passing row is the origin");
    // Every row carries the tolerance it was judged under.
    for l in &lines[1..] {
        assert!(l.contains(",0.000001,"), "row lacks its tolerance: {l}");
    }

    let results: serde_json::Value =
        serde_json::from_str(&read(&out, "results.json")).unwrap();
    assert_eq!(results["gate"]["pass"], serde_json::json!(true));
    assert_eq!(results["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn spectrum_default_yields_four_separated_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("spec");
    let res = run(&["spectrum", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let results: serde_json::Value =
        serde_json::from_str(&read(&out, "results.json")).unwrap();
    let rows = results["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(results["summary"]["min_gap"].as_f64().unwrap() > 0.0);
    for row in rows {
        assert_eq!(row["multiplicity"], serde_json::json!(1));
        assert_eq!(row["pass"], serde_json::json!(true));
    }
}

#[test]
fn identity_suite_passes_for_a2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("suite.toml");
    std::fs::write(&cfg, "kind = \"identity-suite\"\nalgebra = \"A2\"\n").unwrap();
    let out = tmp.path().join("suite");
    let res = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let results: serde_json::Value =
        serde_json::from_str(&read(&out, "results.json")).unwrap();
    let rows = results["rows"].as_array().unwrap();
    assert!(rows.len() >= 6, "module and root-datum identities both run");
    for row in rows {
        assert_eq!(row["pass"], serde_json::json!(true), "failing identity: {row}");
    }
}

#[test]
fn same_seed_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let res = run(&["spectrum", "--seed", "31", "--out", dir.to_str().unwrap()]);
        assert!(res.status.success());
    }
    assert_eq!(read(&a, "results.json"), read(&b, "results.json"));
    assert_eq!(read(&a, "table.csv"), read(&b, "table.csv"));
}

#[test]
fn invalid_configs_exit_one_with_the_violated_precondition() {
    let tmp = tempfile::tempdir().unwrap();

    let cfg = tmp.path().join("coincident.toml");
    std::fs::write(
        &cfg,
        "algebra = \"A1\"\nweights = [[1], [1]]\npoints = [\"1\", \"1\"]\n",
    )
    .unwrap();
    let res = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("distinct"), "names the precondition: {err}");

    let cfg = tmp.path().join("mismatch.toml");
    std::fs::write(&cfg, "kind = \"spectrum\"\n").unwrap();
    let res = run(&["rigidity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("does not match"), "names the mismatch: {err}");

    let res = bin().args(["spectrum", "--tol=-1"]).output().unwrap();
    assert_eq!(res.status.code(), Some(1), "nonpositive tolerance is a config error");

    let res = bin().args(["spectrum", "--no-such-flag"]).output().unwrap();
    assert_eq!(res.status.code(), Some(1), "usage errors are config errors");
}

#[test]
fn gate_failure_exits_two_and_still_emits_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("offgrid.toml");
    // A grid that misses the origin has no passing row, so the gate fails,
    // but the defect table must still be written.
    std::fs::write(
        &cfg,
        "kind = \"rigidity\"\n[rigidity]\ngrid = [[0.25, 0.0], [1.0, 0.0]]\n",
    )
    .unwrap();
    let out = tmp.path().join("offgrid");
    let res = run(&[
        "rigidity",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));

    let table = read(&out, "table.csv");
    assert_eq!(table.lines().count(), 3, "header plus two defect rows:\n{table}");
    assert!(!table.contains(",true"));
    let results: serde_json::Value =
        serde_json::from_str(&read(&out, "results.json")).unwrap();
    assert_eq!(results["gate"]["pass"], serde_json::json!(false));
}
