//! End-to-end runs of the built binary against the documented interface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-tubes"))
}

fn fixture(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("hardy-tubes-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const LORENTZ_CUBE: &str = r#"{
  "n": 1,
  "numerator": [{"index": [0], "re": 1.0, "im": 0.0}],
  "denominators": [[
    {"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}, {"re": 3.0, "im": 0.0},
    {"re": 0.0, "im": 0.0}, {"re": 3.0, "im": 0.0}, {"re": 0.0, "im": 0.0},
    {"re": 1.0, "im": 0.0}
  ]]
}"#;

#[test]
fn norm_on_the_lorentzian_cube() {
    let input = fixture("lorentz.json", LORENTZ_CUBE);
    let out = bin()
        .args(["norm", "--input", input.to_str().unwrap(), "--p", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = report["quasi_norm"]["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 1e-6, "value {value}");
    assert_eq!(report["meta"]["command"], "norm");
    // Reports are self-describing: tolerances embedded.
    assert!(report["meta"]["tolerances"]["quad_rel_tol"].is_array());
}

#[test]
fn malformed_json_exits_2_with_pointer() {
    let input = fixture(
        "bad.json",
        r#"{"n": 2, "numerator": [{"index": [0], "re": 1.0, "im": 0.0}], "denominators": [[{"re": 1.0, "im": 0.0}]]}"#,
    );
    let out = bin()
        .args(["norm", "--input", input.to_str().unwrap(), "--p", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/numerator/0/index"), "{err}");
}

#[test]
fn divergent_norm_exits_3() {
    // 1/(x-1): tail not integrable at p = 0.6.
    let input = fixture(
        "divergent.json",
        r#"{"n": 1, "numerator": [{"index": [0], "re": 1.0, "im": 0.0}],
            "denominators": [[{"re": -1.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]]}"#,
    );
    let out = bin()
        .args(["norm", "--input", input.to_str().unwrap(), "--p", "0.6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn split_auto_phi_meets_bound_and_is_deterministic() {
    let input = fixture("lorentz2.json", LORENTZ_CUBE);
    let run = || {
        let out = bin()
            .args([
                "split",
                "--input",
                input.to_str().unwrap(),
                "--p",
                "0.5",
                "--auto-phi",
                "--grid",
                "16",
                "--seed",
                "7",
                "--threads",
                "2",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "same seed must give byte-identical reports");
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let ratio = report["split"]["achieved_ratio"].as_f64().unwrap();
    let c_np = report["meta"]["constants"]["c_np"].as_f64().unwrap();
    assert!(ratio <= c_np, "ratio {ratio} vs C_np {c_np}");
    assert!(report["bound_checks"][0]["pass"].as_bool().unwrap());
}

#[test]
fn certify_reports_status() {
    let input = fixture("lorentz3.json", LORENTZ_CUBE);
    let out = bin()
        .args([
            "certify",
            "--input",
            input.to_str().unwrap(),
            "--octant",
            "+",
            "--p",
            "0.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // (1 + x^2)^3 has poles on both sides of the axis: not a Hardy function.
    assert_eq!(report["certificate"]["status"], "Invalid");
}

#[test]
fn density_demo_emits_csv() {
    let out = bin()
        .args([
            "density-demo",
            "--N",
            "3",
            "--p",
            "0.5",
            "--degrees",
            "2,4",
            "--target",
            "recip:5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("degree,sup_residual,lp_bound"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn approx_on_csv_samples() {
    let csv = fixture(
        "samples.csv",
        "x1,value\n-2,0.2\n-1,0.5\n-0.5,0.8\n0,1.0\n0.5,0.8\n1,0.5\n2,0.2\n",
    );
    let out = bin()
        .args([
            "approx",
            "--f",
            &format!("csv:{}", csv.to_str().unwrap()),
            "--p",
            "0.5",
            "--epsilon",
            "0.5",
            "--max-atoms",
            "1",
            "--initial-degree",
            "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["series"]["atoms"].as_array().unwrap().len() >= 1);
}

#[test]
fn approx_builtin_gaussian() {
    let out = bin()
        .args([
            "approx",
            "--f",
            "builtin:gaussian",
            "--n",
            "1",
            "--p",
            "0.5",
            "--epsilon",
            "0.5",
            "--max-atoms",
            "1",
            "--initial-degree",
            "8",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let budgets = report["series"]["budgets"].as_array().unwrap();
    let f_norm = report["series"]["f_norm"].as_f64().unwrap();
    // First-stage budget follows the 4^(k+3) schedule.
    assert!((budgets[0].as_f64().unwrap() - f_norm * 0.5 / 256.0).abs() < 1e-9 * f_norm);
}

#[test]
fn xp_demo_runs() {
    let out = bin()
        .args(["xp-demo", "--p", "0.6", "--poles", "1,-1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for check in report["bound_checks"].as_array().unwrap() {
        assert!(
            check["pass"].as_bool().unwrap(),
            "failed check: {}",
            check["name"]
        );
    }
}
