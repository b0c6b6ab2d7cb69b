//! End-to-end checks of the `qop` binary: exit codes, formats and seeds.

use std::io::Write;
use std::process::{Command, Output};

fn qop(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qop"));
    cmd.args(args).env_remove("QOP_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("qop runs")
}

fn scenario(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("qop-cli-{}-{name}.json", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn single_paradox_in_every_format() {
    for format in ["json", "csv", "text"] {
        let out = qop(&["paradox", "4", "--format", format], &[]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("Reproduced"), "{format}: {text}");
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let out = qop(&["paradox", "6", "--format", "json"], &[("QOP_SEED", "42")]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["seed"], 42);
    let bad = qop(&["paradox", "6"], &[("QOP_SEED", "banana")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(qop(&["paradox", "8"], &[]).status.code(), Some(2));
    assert_eq!(qop(&["paradox", "1", "--format", "yaml"], &[]).status.code(), Some(2));
    assert_eq!(qop(&["spectrum", "--operator", "X"], &[]).status.code(), Some(2));
    assert_eq!(qop(&["deficiency", "--operator", "Q_box"], &[]).status.code(), Some(2));
    assert_eq!(qop(&["uncertainty", "--state", "nothing"], &[]).status.code(), Some(2));
    let path = scenario("bad", "{\n  \"grid\": {\"n_points\": 401},\n  \"hbarr\": 1\n}\n");
    let out = qop(&["paradox", "7", "--config", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":3:") && err.contains("hbarr"), "{err}");
}

#[test]
fn tightened_tolerances_fail_with_one() {
    let path = scenario("tight", r#"{"tolerances": {"eigen_check": 1e-14}}"#);
    let out = qop(&["paradox", "3", "--config", path.to_str().unwrap(), "--format", "csv"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("relative_eigen_residual"));
}

#[test]
fn analyses_run_from_flags_and_scenarios() {
    let out = qop(&["spectrum", "--operator", "P_alpha", "--alpha", "0.7", "--k", "3", "--format", "csv"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains(",-0.7,"), "{csv}");
    let out = qop(&["deficiency", "--operator", "P_line", "--format", "json"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v[0]["facts"]["n_plus"].as_u64(), v[0]["facts"]["n_minus"].as_u64()), (Some(0), Some(0)));
    let out = qop(&["fourier", "--state", "gaussian(1)", "--format", "json"], &[]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["facts"]["parseval_defect"].as_f64().unwrap() < 1e-6);
    let path = scenario("ext", r#"{"constants": {"alpha": 0.7}, "analyses": ["extension_family", "classification"]}"#);
    let out = qop(&["scenario", path.to_str().unwrap(), "--format", "json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p0 = v[0]["rows"].as_array().unwrap().iter().find(|r| r[0] == 0).unwrap()[1].as_f64().unwrap();
    assert!((p0 + 0.7).abs() < 1e-12);
    assert_eq!(v[1]["facts"]["classification"], "hermitian-not-self-adjoint");
}
