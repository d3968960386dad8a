//! CLI acceptance: deterministic reports and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn hckit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hckit"))
        .args(args)
        .output()
        .expect("failed to run hckit")
}

#[test]
fn criterion_13_determinism() {
    // identical seeded runs produce byte-identical reports
    let args = ["operators", "pi_dw2", "--points", "500", "--seed", "42", "--relations"];
    let first = hckit(&args);
    let second = hckit(&args);
    assert!(first.status.success());
    let pass = first.stdout == second.stdout && !first.stdout.is_empty();
    println!(
        "criterion 13: {} — repeated CLI runs with the same seed are byte-identical",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);

    let va = hckit(&["verify", "ex1", "--seed", "7"]);
    let vb = hckit(&["verify", "ex1", "--seed", "7"]);
    assert!(va.status.success());
    let pass = va.stdout == vb.stdout;
    println!(
        "criterion 13: {} — verify reports with the same seed are byte-identical",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn exit_codes_follow_the_contract() {
    // 0: all checks pass
    let ok = hckit(&["verify", "ex1"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // 2: parameter constraint violated
    let dir = std::env::temp_dir().join("hckit_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad_params.json");
    std::fs::write(
        &bad,
        r#"{"example": "ex1", "params": {"a": 2.0, "b": 1.0, "c": 1.0, "a_p": 1.0, "b_p": 2.0, "c_p": 9.0}}"#,
    )
    .unwrap();
    let violated = hckit(&["verify", "ex1", "--params", bad.to_str().unwrap()]);
    assert_eq!(violated.status.code(), Some(2));

    // 2: unknown identifier
    let unknown = hckit(&["operators", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));

    // 1: trace runs into a zero of the differential, partial CSV flagged
    let csv = dir.join("partial.csv");
    let hit = hckit(&[
        "trace",
        "pi_dw2",
        "--start",
        "0.3,0,0.5",
        "--mode",
        "vertical",
        "--orientation",
        "-1",
        "--steps",
        "1000",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(hit.status.code(), Some(1));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 100, "partial trace should still be written");
}

#[test]
fn trace_csv_schema_and_zero_steps() {
    let dir = std::env::temp_dir().join("hckit_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("line.csv");
    let out = hckit(&[
        "trace",
        "dz2",
        "--start",
        "0,1,0",
        "--mode",
        "horizontal",
        "--steps",
        "100",
        "--step-size",
        "1e-3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,re_z,im_z,t,re_vz,im_vz,legendrian_defect"
    );
    assert_eq!(lines.count(), 101);
    // straight-line lift: last sample approximately (0.1 + i, 0.2)
    let last = text.lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|v| v.parse().unwrap()).collect();
    assert!((cols[1] - 0.1).abs() < 1e-6 && (cols[2] - 1.0).abs() < 1e-6);
    assert!((cols[3] - 0.2).abs() < 1e-5);

    // zero steps: header-only CSV, exit 0
    let empty = dir.join("empty.csv");
    let out = hckit(&[
        "trace",
        "dz2",
        "--start",
        "0,1,0",
        "--mode",
        "horizontal",
        "--steps",
        "0",
        "--out",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&empty).unwrap();
    assert_eq!(text.lines().count(), 2, "zero-step trace keeps only the start sample");
}

#[test]
fn modulus_command_matches_closed_form() {
    let out = hckit(&["modulus", "ex2_radii", "rho0"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expected = 8.0 * 2.0 * (std::f64::consts::PI / 2.0) / 27.0;
    let energy = json["energy"].as_f64().unwrap();
    assert!(((energy - expected) / expected).abs() < 1e-6);
    assert!((json["margin"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(json["schema"].as_u64(), Some(1));
}

#[test]
fn distortion_command_reports_constant_k() {
    let out = hckit(&["distortion", "ex1_f0", "--grid", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // defaults: A = 1/2, B = 2 so K = 4
    assert!((json["k_max"].as_f64().unwrap() - 4.0).abs() < 1e-10);
    assert!(json["contact_defect_max"].as_f64().unwrap() < 1e-8);
    assert!(json["beltrami_sup"].as_f64().unwrap() < 1.0);
}

#[test]
fn operators_command_reports_annihilation() {
    for qd in ["dz2", "pi_dw2", "pi_dw2_over_w2"] {
        let out = hckit(&["operators", qd, "--points", "300"]);
        assert_eq!(out.status.code(), Some(0), "{qd}");
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(json["d2prime_max"].as_f64().unwrap() < 1e-9);
        assert!(json["d2second_max"].as_f64().unwrap() < 1e-9);
        if qd == "pi_dw2" {
            assert!(!json["b2_vanishes"].as_bool().unwrap());
        }
        if qd == "dz2" {
            assert!(json["b2_vanishes"].as_bool().unwrap());
        }
    }
}

#[test]
fn thread_cap_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_hckit"))
        .env("HCKIT_THREADS", "1")
        .args(["verify", "d_domain"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn params_file_example_mismatch_is_config_error() {
    let dir = std::env::temp_dir().join("hckit_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path: &Path = &dir.join("ex3.json");
    std::fs::write(path, r#"{"example": "ex3", "params": {"k": 0.5, "D": 1.0}}"#).unwrap();
    let out = hckit(&["verify", "ex1", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
