//! The `qsc` binary: exit codes, determinism and the documented examples.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsc"))
        .args(args)
        .env_remove("QSC_SEED")
        .output()
        .expect("qsc runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn wire_one_reads_even_distribution() {
    let out = qsc(&["run", fixture("minimal.qsc").to_str().unwrap(), "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    let d = r["distribution"].as_object().unwrap();
    assert_eq!(d.len(), 2);
    for key in ["0", "1"] {
        assert!((d[key].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
    assert_eq!(r["circuit"]["peak_qubits"], 3);
    assert_eq!(r["seed"], 5);
}

#[test]
fn same_seed_same_bytes() {
    let f = fixture("bell_hybrid.qsc");
    let f = f.to_str().unwrap();
    let a = qsc(&["run", f, "--seed", "42"]);
    let b = qsc(&["run", f, "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_qsc"))
        .args(["run", f])
        .env("QSC_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let to_file = qsc(&["run", f, "--seed", "42", "--json", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = qsc(&["run", fixture("minimal.qsc").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"0\": 5.0000000000000"), "{text}");
    assert!(text.contains("7.0710678118654757e-1"));
}

#[test]
fn impossible_forced_outcome_exits_three() {
    // a reads 0, so b must read 0 as well
    let out = qsc(&["run", fixture("combinational_ghz.qsc").to_str().unwrap(), "--force-outcomes", "0,1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("readout b"), "{err}");

    let ok = qsc(&["run", fixture("combinational_ghz.qsc").to_str().unwrap(), "--force-outcomes", "1,1,1"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert_eq!(json(&ok)["config"]["forced_outcomes"], "111");

    let short = qsc(&["run", fixture("combinational_ghz.qsc").to_str().unwrap(), "--force-outcomes", "0"]);
    assert_eq!(short.status.code(), Some(3));
    assert!(stderr(&short).contains("readout b"));
}

#[test]
fn validation_errors_exit_two() {
    let out = qsc(&["run", fixture("invalid/loop_two_transistors.qsc").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains(":4:1: E103: loop endpoints must share a transistor"), "{err}");

    assert_eq!(qsc(&["run", "/nonexistent/file.qsc"]).status.code(), Some(2));
    let bad_forced = qsc(&["run", fixture("minimal.qsc").to_str().unwrap(), "--force-outcomes", "2"]);
    assert_eq!(bad_forced.status.code(), Some(2));
    let both = qsc(&["run", fixture("minimal.qsc").to_str().unwrap(), "--seed", "1", "--force-outcomes", "0"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn verify_passes_on_fixtures() {
    for name in ["minimal.qsc", "iterate_h_k4.qsc", "bell_hybrid.qsc"] {
        let out = qsc(&["verify", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        let r = json(&out);
        assert_eq!(r["pass"], true);
        assert!(r["max_deficit"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn corrupted_byproducts_exit_four() {
    let f = fixture("negative/corrupt_byproduct.qsc");
    let out = qsc(&["verify", f.to_str().unwrap(), "--ignore-byproducts"]);
    assert_eq!(out.status.code(), Some(4));
    let r = json(&out);
    assert!(r["max_deficit"].as_f64().unwrap() > 1e-3);
    assert_eq!(r["pass"], false);
    assert_eq!(qsc(&["verify", f.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn demo_examples() {
    let qaa = qsc(&["demo", "qaa", "p=0.25", "n=1"]);
    assert_eq!(qaa.status.code(), Some(0), "{}", stderr(&qaa));
    let p = json(&qaa)["result"]["success_probability"].as_f64().unwrap();
    assert!((p - 1.0).abs() < 1e-9);

    let qpe = qsc(&["demo", "qpe", "u=S", "t=2"]);
    let d = json(&qpe)["result"]["distribution"].clone();
    let d = d.as_object().unwrap();
    assert_eq!(d.keys().collect::<Vec<_>>(), vec!["01"]);
    assert!((d["01"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let hist = qsc(&["demo", "history", "T=1", "u1=X"]);
    let w = json(&hist)["result"]["branch_weights"].clone();
    let w: Vec<f64> = w.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(w.len(), 2);
    assert!(w.iter().all(|x| (x - 0.5).abs() < 1e-10));
}

#[test]
fn every_demo_runs() {
    for name in ["qpe", "qaa", "lcu", "qmux", "history", "qconv", "trotter", "superchannel"] {
        let out = qsc(&["demo", name, "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert_eq!(json(&out)["demo"], name);
    }
    assert_eq!(qsc(&["demo", "nope"]).status.code(), Some(2));
    assert_eq!(qsc(&["demo", "qpe", "t=7"]).status.code(), Some(2));
    assert_eq!(qsc(&["demo", "qaa", "q=1"]).status.code(), Some(2));
}

#[test]
fn fmt_is_a_fixpoint() {
    let out = qsc(&["fmt", fixture("bell_hybrid.qsc").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("again.qsc");
    std::fs::write(&path, &out.stdout).unwrap();
    let again = qsc(&["fmt", path.to_str().unwrap()]);
    assert_eq!(again.stdout, out.stdout);
}
