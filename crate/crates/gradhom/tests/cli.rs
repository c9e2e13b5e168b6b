//! The binary end to end: outputs, exit codes, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn gradhom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradhom")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = gradhom(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (v, out.status.code().unwrap())
}

#[test]
fn report_has_fixed_top_level_keys() {
    let (v, code) = report(&["homogenize", "--config", &config("circle_void.json")]);
    assert_eq!(code, 0);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want = vec![
        "config",
        "inertia",
        "ctilde",
        "aeq",
        "params",
        "definiteness",
        "symmetry",
        "warnings",
        "verification",
    ];
    // serde_json's map is sorted; the written order is checked on the raw text below.
    want.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, want);
    let text = String::from_utf8(gradhom(&["homogenize", "--config", &config("circle_void.json")]).stdout).unwrap();
    let pos: Vec<usize> = [
        "\"config\"",
        "\"inertia\"",
        "\"ctilde\"",
        "\"aeq\"",
        "\"params\"",
        "\"definiteness\"",
        "\"symmetry\"",
        "\"warnings\"",
        "\"verification\"",
    ]
    .iter()
    .map(|k| text.find(&format!("\n  {k}:")).unwrap_or_else(|| panic!("{k} missing")))
    .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn rect_circle_report() {
    let (v, code) = report(&["homogenize", "--config", &config("rect_circle.json")]);
    assert_eq!(code, 0);
    let a2 = v["params"]["a2"][0].as_f64().unwrap();
    let want = std::f64::consts::PI * 0.01 / 24.0 * 2.0 * 1.125;
    assert!((a2 - want).abs() <= 1e-12 * want);
    assert!((a2 - 2.9452e-3).abs() < 1e-7);
    assert_eq!(v["symmetry"]["label"], "orthotropic");
    assert_eq!(v["verification"]["closed_form"]["passed"], true);
    assert_eq!(v["ctilde"]["lambda_tilde"], -1.125);
}

#[test]
fn identical_phases_give_zero_isotropic_tensor() {
    let (v, code) = report(&["homogenize", "--config", &config("identical_phases.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["aeq"]["norm"], 0.0);
    assert_eq!(v["symmetry"]["label"], "isotropic");
    assert_eq!(v["definiteness"]["positive_definite"], false);
}

#[test]
fn stiff_inclusion_is_not_positive_definite() {
    let (v, code) = report(&["homogenize", "--config", &config("stiff_inclusion.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["definiteness"]["positive_definite"], false);
    assert_eq!(v["ctilde"]["negative_definite"], false);
}

#[test]
fn reports_are_byte_identical() {
    for name in ["rect_circle.json", "rotated_ellipse.json", "box_sphere_soft.json"] {
        let a = gradhom(&["homogenize", "--config", &config(name), "--seed", "7"]);
        let b = gradhom(&["homogenize", "--config", &config(name), "--seed", "7"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn spherical_sign_warning_and_flag() {
    let (v, _) = report(&["homogenize", "--config", &config("box_sphere_soft.json")]);
    let codes: Vec<&str> = v["warnings"].as_array().unwrap().iter().map(|w| w["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"spherical_sign_conflict"));
    let (v, _) = report(&["homogenize", "--config", &config("box_sphere_soft.json"), "--erratum-sign-3d"]);
    assert!(v["warnings"].as_array().unwrap().is_empty());
    assert_eq!(v["ctilde"]["erratum_sign_3d"], true);
}

#[test]
fn subcommand_sections() {
    let (v, _) = report(&["inertia", "--config", &config("rect_circle.json")]);
    assert!(v.get("inertia").is_some() && v.get("aeq").is_none());
    assert_eq!(v["inertia"]["sum_rule_residual"], 0.0);
    let (v, _) = report(&["ctilde", "--config", &config("square_ellipse.json")]);
    assert_eq!(v["ctilde"]["form"], "orthotropic");
    let (v, _) = report(&["classify", "--config", &config("rotated_ellipse.json")]);
    assert_eq!(v["symmetry"]["label"], "orthotropic");
    assert_eq!(v["symmetry"]["consistent"], true);
}

#[test]
fn condensed_csv() {
    let out = gradhom(&["homogenize", "--config", &config("rect_circle.json"), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "coordinate,b111,b122,b112,b211,b222,b212");
}

#[test]
fn sweep_csv() {
    let out = gradhom(&["sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda_ratio,nu1,a2_norm,a4_norm,a6_norm"));
    assert_eq!(lines.count(), 400);
    let out = gradhom(&["sweep", "--config", &config("figure_sweep.json"), "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 20);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = gradhom(&["homogenize", "--config", &config("square_crack.json"), "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verification"]["closed_form"]["case"], "square_crack");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "dimension": 2, "model": "nope"}"#).unwrap();
    let out = gradhom(&["homogenize", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("model") && stderr.contains("rve"), "{stderr}");

    // Elastic ellipse: no closed form in the catalog.
    let model = dir.path().join("model.json");
    std::fs::write(
        &model,
        r#"{"schema_version": 1, "dimension": 2, "model": "generic",
            "rve": {"shape": "square", "h": 1.0},
            "inclusion": {"shape": "ellipse", "b1": 0.2, "b2": 0.1, "material": {"lambda": 1.0, "mu": 0.5}},
            "matrix": {"lambda": 1.0, "mu": 1.0}}"#,
    )
    .unwrap();
    assert_eq!(gradhom(&["homogenize", "--config", model.to_str().unwrap()]).status.code(), Some(2));

    let out = gradhom(&["verify", "--inject-perturbation", "0.1", "--cases", "5", "--samples", "200000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("annihilation"));

    assert_eq!(gradhom(&["inertia", "--config", &config("rect_circle.json"), "--format", "csv"]).status.code(), Some(1));
    assert_eq!(gradhom(&["homogenize"]).status.code(), Some(1));
}

#[test]
fn verify_job_and_suite() {
    let (v, code) = report(&["verify", "--config", &config("square_ellipse.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["passed"], true);
    let out = gradhom(&["verify", "--cases", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,cases,max_residual,tolerance,passed"));
}

#[test]
fn verify_is_deterministic() {
    let a = gradhom(&["verify", "--cases", "10", "--samples", "100000", "--seed", "3"]);
    let b = gradhom(&["verify", "--cases", "10", "--samples", "100000", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_flags_reach_the_report() {
    let (v, _) = report(&["homogenize", "--config", &config("rotated_ellipse.json"), "--tol-structure", "1e-6", "--tol-classification", "1e-6"]);
    assert_eq!(v["params"]["tolerance"], 1e-6);
    assert_eq!(v["symmetry"]["tolerance"], 1e-6);
    assert_eq!(gradhom(&["homogenize", "--tol-structure", "-1"]).status.code(), Some(1));
}
