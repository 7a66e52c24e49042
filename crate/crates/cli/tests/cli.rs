//! End-to-end tests of the `ffpe` binary: output values, formats, and the
//! exit-code contract (0 clean, 1 usage error, 2 flagged result).

use std::process::{Command, Output};

fn ffpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffpe"))
        .args(args)
        .output()
        .expect("failed to spawn ffpe")
}

fn density(out: &Output) -> f64 {
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("eval output is not JSON");
    v["density"].as_f64().expect("missing density field")
}

#[test]
fn eval_cauchy_zero_point() {
    let out = ffpe(&["eval", "--d", "1", "--alpha", "0.5", "--Do", "0", "--Df", "8", "--t", "0.1", "--y", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = 0.397887357729738;
    assert!((density(&out) - expected).abs() <= 1e-12 * expected);
}

#[test]
fn eval_gaussian_zero_point() {
    let out = ffpe(&["eval", "--d", "1", "--Do", "1", "--Df", "0", "--t", "0.25", "--y", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = 0.564189583547756;
    assert!((density(&out) - expected).abs() <= 1e-12 * expected);
}

#[test]
fn eval_point_matches_radial() {
    let radial = ffpe(&["eval", "--d", "3", "--alpha", "0.5", "--Do", "1", "--Df", "8", "--t", "0.1", "--y", "0.5"]);
    let point = ffpe(&["eval", "--d", "3", "--alpha", "0.5", "--Do", "1", "--Df", "8", "--t", "0.1", "--x", "0.3,0,-0.4"]);
    assert_eq!(radial.status.code(), Some(0));
    assert_eq!(point.status.code(), Some(0));
    assert_eq!(density(&radial).to_bits(), density(&point).to_bits());
}

#[test]
fn missing_time_is_usage_error() {
    let out = ffpe(&["eval", "--d", "1", "--alpha", "0.5", "--Do", "0", "--Df", "8", "--y", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn conflicting_positions_are_usage_error() {
    let out = ffpe(&["eval", "--d", "1", "--t", "0.1", "--y", "0.5", "--x", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_alpha_is_usage_error() {
    let out = ffpe(&["eval", "--d", "1", "--alpha", "1.5", "--t", "0.1", "--y", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_converged_evaluation_exits_2_with_value() {
    let out = ffpe(&["eval", "--d", "9", "--alpha", "0.3333333333333333", "--Do", "0", "--Df", "8", "--t", "0.004", "--y", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["converged"], serde_json::Value::Bool(false));
    assert!(v["density"].as_f64().unwrap().is_finite());
}

#[test]
fn grid_output_is_deterministic() {
    let args = ["grid", "--d", "2", "--alpha", "0.75", "--Do", "0.5", "--Df", "2", "--y-count", "5", "--t-count", "3"];
    let a = ffpe(&args);
    let b = ffpe(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,alpha,Do,Df,t,y,density,branch,final_M,used_scaling,converged"));
    assert_eq!(lines.count(), 15);
}

#[test]
fn window_study_error_decays() {
    let out = ffpe(&["window-study", "--m", "80,1280"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "M,E1,E2");
    let e2_last: f64 = rows[2].split(',').nth(2).unwrap().parse().unwrap();
    assert!(e2_last <= 1e-13, "E2(1280) = {e2_last}");
}

#[test]
fn cache_dir_round_trip() {
    let dir = std::env::temp_dir().join(format!("ffpe-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ffpe"))
            .env("FFPE_CACHE_DIR", &dir)
            .args(["eval", "--d", "3", "--alpha", "0.5", "--Do", "1", "--Df", "8", "--t", "0.1", "--y", "0.5"])
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    assert!(dir.join("rules.bin").exists());
    let second = run();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
