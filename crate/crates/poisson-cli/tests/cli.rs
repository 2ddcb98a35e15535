use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poisson")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn element(i: &str, j: &str) -> String {
    format!(r#"{{"d":2,"mode":"exact","terms":[{{"I":"{i}","J":"{j}","re":"1","im":"0"}}]}}"#)
}

#[test]
fn classify_binary_weights() {
    let out = run(&["classify", "--weights", "1/2,1/2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "III_lambda");
    assert_eq!(v["lambda"], "1/2");

    let v = json(&run(&["classify", "--weights", "1/3,2/3"]));
    assert_eq!(v["kind"], "III_one");
}

#[test]
fn classify_golden_ratio_in_float_mode() {
    let l = (5f64.sqrt() - 1.0) / 2.0;
    let weights = format!("{l},{}", l * l);
    let out = run(&["--mode", "float", "classify", "--weights", &weights, "--min-poly", "-1,1,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["lambda_f64"].as_f64().unwrap() - 0.6180339887).abs() < 1e-9);
}

#[test]
fn spectrum_of_uniform_weights() {
    let v = json(&run(&["spectrum", "--weights", "1/2,1/2", "--max-len", "2"]));
    let s: Vec<&str> = v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(s, ["1/4", "1/2", "1", "2", "4"]);
}

#[test]
fn iterative_product_agrees_with_symbolic() {
    let left = scratch("r1_star.json", &element("", "1"));
    let right = scratch("r1.json", &element("1", ""));
    let out = run(&[
        "product", "--weights", "1/3,2/3", "--left", left.to_str().unwrap(), "--right", right.to_str().unwrap(),
        "--method", "iterative",
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["agrees_with_symbolic"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["classify", "--weights", "1/2,1/3"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--weights", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_json_reports_its_location() {
    let bad = scratch("bad.json", "{\"d\": 2,\n  \"mode\": }");
    let good = scratch("good.json", &element("1", ""));
    let out = run(&[
        "product", "--weights", "1/2,1/2", "--left", bad.to_str().unwrap(), "--right", good.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");
}

#[test]
fn verify_is_reproducible_and_writes_json_file() {
    let a = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("verify_a.json");
    let b = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("verify_b.json");
    for p in [&a, &b] {
        let out = run(&[
            "--seed", "7", "--json", p.to_str().unwrap(), "verify", "phi", "--weights", "1/3,2/3", "--trials", "5",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn quantize_counterexample_for_unequal_weights() {
    let out = run(&["quantize", "--weights", "1/3,2/3", "--check", "counterexample"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["witness_coefficient"]["re"], "-1/3");
}

#[test]
fn probes_succeed_on_standard_weights() {
    for kind in ["masa", "center", "dr", "diffuse"] {
        let out = run(&["probe", kind, "--weights", "1/3,2/3"]);
        assert_eq!(out.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn center_probe_fails_on_a_projection() {
    let m = scratch("m11.json", &element("1", "1"));
    let out = run(&["probe", "center", "--weights", "1/3,2/3", "--element", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
