//! Smoke tests for the `wloop` binary: exit codes, report envelopes, and
//! byte-identical reruns modulo the timestamp.

use std::io::Write;
use std::process::{Command, Output};

use wloop::report::strip_timestamp;

fn wloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn circle_file() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(
        f,
        r#"{{"type": "circle", "center": [0.0, 0.0], "radius": 1.0}}"#
    )
    .unwrap();
    f
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn diagrams_order_3_has_15_matchings_and_5_classes() {
    let out = wloop(&["--format", "json", "diagrams", "--order", "3", "--classes"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["count"], 15);
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 5);
}

#[test]
fn series_u2_matches_printed_values() {
    let out = wloop(&[
        "--format", "json", "series", "--group", "u:2", "--t", "1", "--orders", "2",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let coeffs = v["result"]["coefficients"].as_array().unwrap();
    let got: Vec<f64> = coeffs.iter().map(|c| c.as_f64().unwrap()).collect();
    for (g, want) in got.iter().zip([1.0, -1.0, 0.375]) {
        assert!((g - want).abs() < 1e-12, "{got:?}");
    }
}

#[test]
fn chi_at_circle_center_is_minus_one() {
    let f = circle_file();
    let out = wloop(&[
        "--format", "json",
        "chi",
        "--contour", f.path().to_str().unwrap(),
        "--points", "(0,0)",
        "--cyclic",
        "--samples", "50000",
        "--seed", "3",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let re = v["result"]["value_re"].as_f64().unwrap();
    assert!((re + 1.0).abs() < 1e-6, "{v}");
}

#[test]
fn factor_mc_and_chi_oracle_run() {
    let f = circle_file();
    for method in ["mc", "chi-oracle"] {
        let out = wloop(&[
            "--format", "json",
            "factor",
            "--contour", f.path().to_str().unwrap(),
            "--diagram", "(1,2)",
            "--method", method,
            "--samples", "100000",
        ]);
        assert!(out.status.success(), "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json_of(&out);
        let re = v["result"]["value_re"].as_f64().unwrap();
        assert!(
            (re - std::f64::consts::PI / 2.0).abs() < 0.05,
            "{method}: {re}"
        );
    }
}

#[test]
fn verify_t1_passes_on_circle_and_exits_zero() {
    let f = circle_file();
    let out = wloop(&[
        "--format", "json",
        "verify", "t1",
        "--contour", f.path().to_str().unwrap(),
        "--group", "u:1",
        "--samples", "200000",
        "--seed", "7",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["result"]["pass"], true);
}

#[test]
fn gmm_mc_u1_approximates_exponential() {
    let out = wloop(&[
        "--format", "json",
        "gmm-mc", "--group", "u:1", "--t", "1.0", "--samples", "200000",
    ]);
    assert!(out.status.success());
    let v = json_of(&out);
    let got = v["result"]["value"].as_f64().unwrap();
    assert!((got - (-0.5f64).exp()).abs() < 0.01, "{got}");
}

#[test]
fn reruns_are_byte_identical_modulo_timestamp() {
    let f = circle_file();
    let args = [
        "--format", "json",
        "factor",
        "--contour", f.path().to_str().unwrap(),
        "--diagram", "(1,3)(2,4)",
        "--samples", "50000",
        "--seed", "11",
        "--shards", "8",
    ];
    let mut a = json_of(&wloop(&args));
    let mut b = json_of(&wloop(&args));
    strip_timestamp(&mut a);
    strip_timestamp(&mut b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn usage_and_runtime_errors_exit_two() {
    // unknown flag
    let out = wloop(&["diagrams", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // missing contour file
    let out = wloop(&["chi", "--contour", "/nonexistent.json", "--points", "(0,0)"]);
    assert_eq!(out.status.code(), Some(2));
    // invalid group spec
    let out = wloop(&["series", "--group", "sp:4", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // order beyond the enumeration cap
    let out = wloop(&["diagrams", "--order", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verification_failure_exits_one() {
    // a coarse light-cone regulator leaves an O(ε) systematic bias far
    // outside the statistical tolerance, so the verifier must report failure
    let f = circle_file();
    let out = wloop(&[
        "verify", "t1",
        "--contour", f.path().to_str().unwrap(),
        "--group", "u:1",
        "--gauge", "wml:0.8",
        "--samples", "500000",
        "--seed", "1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "stdout: {}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn explore_o3_never_fails_the_run() {
    let f = circle_file();
    let out = wloop(&[
        "--format", "json",
        "explore", "o3",
        "--contour", f.path().to_str().unwrap(),
        "--samples", "50000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert!(v["result"]["c3"].is_number(), "{v}");
}

#[test]
fn table_and_csv_formats_render() {
    let out = wloop(&["--format", "table", "diagrams", "--order", "2", "--classes"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
    let out = wloop(&["--format", "csv", "series", "--group", "u:2", "--t", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).lines().count() >= 2);
}
