use std::process::Command;

use otto_tur::cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("otto-tur").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn csv_rows(out: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = out.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn report_classifies_reference_engine() {
    let doc = json(&["report", "--wa", "1", "--wb", "0.6", "--ba", "1", "--bb", "2", "--theta", "1.5707963"]);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["regime"], "heat_engine");
    assert!((doc["efficiency"]["eta"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(doc["checks"]["standard_tur_satisfied"], true);
}

#[test]
fn report_without_coupling_is_degenerate() {
    let doc = json(&["report", "--theta", "0"]);
    assert_eq!(doc["regime"], "degenerate");
    for key in ["mean_w", "mean_qh", "mean_qc"] {
        assert_eq!(doc["moments"][key].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn report_flags_qubit_violation() {
    let doc = json(&["report", "--variant", "qubit", "--wa", "1", "--wb", "0.6", "--ba", "0.2", "--bb", "2", "--theta", "1.5707963"]);
    assert_eq!(doc["checks"]["standard_tur_satisfied"], false);
    assert_eq!(doc["checks"]["saturable_satisfied"], true);
}

#[test]
fn work_sign_sweep() {
    let (code, out, _) = invoke(&[
        "sweep", "--variable", "omega_b_ratio", "--start", "0.01", "--stop", "1.6", "--points", "160", "--ba", "1", "--bb", "2",
    ]);
    assert_eq!(code, EXIT_OK);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["omega_b_ratio", "mean_w", "mean_qh", "sigma"]);
    for row in rows {
        let (ratio, w, sigma) = (row[0], row[1], row[3]);
        if (ratio - 0.5).abs() < 1e-9 || (ratio - 1.0).abs() < 1e-9 {
            assert!(w.abs() < 1e-12);
        } else {
            assert_eq!(w < 0.0, ratio > 0.5 && ratio < 1.0, "at {ratio}");
        }
        assert!(sigma >= 0.0);
    }
}

#[test]
fn variance_sweep_sits_above_both_bounds() {
    let (code, out, _) = invoke(&[
        "sweep",
        "--variable",
        "omega_b_ratio",
        "--start",
        "0.05",
        "--stop",
        "1.6",
        "--points",
        "80",
        "--outputs",
        "var_w,var_w_shifted_tur_bound,var_w_saturable_bound",
    ]);
    assert_eq!(code, EXIT_OK);
    let (_, rows) = csv_rows(&out);
    for row in rows {
        assert!(row[1] >= row[2] * (1.0 - 1e-12) && row[2] >= 0.0);
        assert!(row[3] <= row[1]);
    }
}

#[test]
fn thermalization_sweep_orders_by_contact_time() {
    let (code, out, err) = invoke(&["thermalization", "--na", "3", "--gamma-taus", "1,2,3", "--nb-start", "0.05", "--nb-stop", "2.9", "--nb-points", "40"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (header, rows) = csv_rows(&out);
    let cols: Vec<usize> = ["snr_gt_1", "snr_gt_2", "snr_gt_3", "snr_ideal"].iter().map(|c| column(&header, c)).collect();
    for row in rows {
        assert!(cols.windows(2).all(|w| row[w[0]] < row[w[1]]));
    }
}

#[test]
fn oracle_comparisons_pass() {
    for args in [
        vec!["oracle-compare", "--variant", "bosonic", "--n-max", "60", "--tol", "1e-7"],
        vec!["oracle-compare", "--variant", "qubit", "--ba", "0.2", "--tol", "1e-12"],
        vec!["oracle-compare", "--variant", "squeeze", "--na", "0.5", "--nb", "0.2", "--r", "0.5", "--n-max", "80", "--tol", "1e-6"],
        vec!["oracle-compare", "--variant", "cubic", "--wb", "0.3"],
    ] {
        let doc = json(&args);
        assert_eq!(doc["pass"], true, "{args:?}: {doc}");
    }
}

#[test]
fn oracle_tolerance_failure_exits_three() {
    let (code, out, _) = invoke(&["oracle-compare", "--n-max", "60", "--tol", "1e-30"]);
    assert_eq!(code, EXIT_TOLERANCE);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["pass"], false);
}

#[test]
fn oracle_truncation_refusal_is_a_domain_error() {
    let (code, _, err) = invoke(&["oracle-compare", "--variant", "squeeze", "--r", "1.0", "--n-max", "10"]);
    assert_eq!(code, EXIT_DOMAIN);
    assert!(err.contains("n_max"), "{err}");
}

#[test]
fn sampling_is_reproducible() {
    let a = invoke(&["sample", "--count", "500", "--seed", "9"]).1;
    let b = invoke(&["sample", "--count", "500", "--seed", "9"]).1;
    let c = invoke(&["sample", "--count", "500", "--seed", "10"]).1;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("draw_index,n,w,q_h\r\n"));
    assert_eq!(a.lines().count(), 501);
}

#[test]
fn violation_scan_summarizes_on_stderr() {
    let (code, out, err) = invoke(&["violation-scan", "--resolution", "30"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("n_a,n_b,snr,half_sigma,violated"));
    assert_eq!(out.lines().count(), 901);
    assert!(err.contains("violation area fraction"));
}

#[test]
fn domain_and_usage_errors() {
    assert_eq!(invoke(&["report", "--wa", "-1"]).0, EXIT_DOMAIN);
    assert_eq!(invoke(&["sweep", "--variable", "n_b", "--start", "-1", "--stop", "2"]).0, EXIT_DOMAIN);
    assert_eq!(invoke(&["sweep", "--variable", "theta", "--start", "0", "--stop", "1", "--points", "1"]).0, EXIT_DOMAIN);
    assert_eq!(invoke(&["thermalization", "--theta", "1.0"]).0, EXIT_DOMAIN);
    assert_eq!(invoke(&["report", "--variant", "nope"]).0, EXIT_USAGE);
    assert_eq!(invoke(&["--config", "/nonexistent/config.json", "report"]).0, EXIT_USAGE);
}

#[test]
fn binary_reads_config_and_lets_flags_win() {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let config = dir.join("otto_report_config.json");
    std::fs::write(&config, r#"{"wb": 0.3, "theta-frac": 0.25, "variant": "bosonic"}"#).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_otto-tur"))
        .args(["--config", config.to_str().unwrap(), "report", "--wb", "0.7"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let doc: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["params"]["omega_b"], 0.7);
    assert!((doc["params"]["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);

    let output = Command::new(env!("CARGO_BIN_EXE_otto-tur")).args(["report", "--bb", "nan"]).output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_DOMAIN));
}
