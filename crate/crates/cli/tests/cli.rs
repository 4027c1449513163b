use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcond")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = dcond(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), out.status.code().unwrap())
}

fn verdict(v: &Value, name: &str) -> String {
    v["verdicts"][name]["verdict"].as_str().unwrap().to_string()
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn surface_with_quartic_curve() {
    let (v, code) = json(&[
        "check",
        "--vars",
        "x1,x2,x3",
        "--poly",
        "(x1-x2*x3)*(x1^3+x2^4)",
        "--conditions",
        "H,B,L,KOSZUL,A_INV",
    ]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&v, "H"), "Holds");
    assert_eq!(verdict(&v, "B"), "Holds");
    assert_eq!(verdict(&v, "L"), "Holds");
    assert_eq!(verdict(&v, "Koszul"), "Holds");
    assert_eq!(verdict(&v, "A(1/h)"), "Fails");
    for (_, r) in v["verdicts"].as_object().unwrap() {
        assert!(!r["trace"].as_array().unwrap().is_empty());
    }
}

#[test]
fn cube_functional_equation() {
    let (v, code) = json(&["bfun", "--vars", "x", "--poly", "x^3", "--max-order", "3"]);
    assert_eq!(code, 0);
    let cert = &v["verdicts"]["B"]["certificate"];
    assert_eq!(cert["roots"], "-1/3, -2/3, -1");
    assert_eq!(cert["P"], "1/27*dx^3");
    assert_eq!(cert["b"], "(s+1/3)(s+2/3)(s+1)");
}

#[test]
fn smooth_germ_and_inferred_variables() {
    let (v, code) = json(&["check", "--poly", "x1", "--conditions", "B"]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&v, "B"), "Holds");
    assert_eq!(v["input"]["vars"], serde_json::json!(["x1"]));
}

#[test]
fn json_is_stable_and_round_trips() {
    let args = ["check", "--poly", "x1^2+x2^3", "--conditions", "H,B,W,A_INV,M", "--format", "json"];
    let a = dcond(&args).stdout;
    let b = dcond(&args).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["limits"]["max_steps"], 1_000_000);
}

#[test]
fn unknown_exits_two() {
    let (v, code) = json(&["check", "--poly", "x1*x2*(x1+x2)*(x1+x3)", "--conditions", "A_INV"]);
    assert_eq!(code, 2);
    assert_eq!(verdict(&v, "A(1/h)"), "Unknown");
}

#[test]
fn errors_exit_one() {
    let out = dcond(&["check", "--poly", "x1 +"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 4"));
    assert_eq!(dcond(&["check", "--poly", "x1", "--conditions", "Q"]).status.code(), Some(1));
    assert_eq!(dcond(&["check", "--bogus"]).status.code(), Some(1));
    assert_eq!(dcond(&["check", "--vars", "x1", "--poly", "y"]).status.code(), Some(1));
    assert_eq!(dcond(&["check", "--poly", "x1^2+x2^3", "--weights", "1,1"]).status.code(), Some(1));
}

#[test]
fn arrangement_of_two_surfaces() {
    let (v, code) = json(&[
        "arrangement",
        "--vars",
        "x1,x2,x3",
        "--factor",
        "x1^2+x2^3+x3^4",
        "--factor",
        "x1^2+2*x2^3+3*x3^4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&v, "generic"), "Holds");
    assert_eq!(verdict(&v, "annihilation"), "Holds");
    assert_eq!(v["verdicts"]["annihilation"]["certificate"].as_object().unwrap().len(), 4);
    assert_eq!(verdict(&v, "A(1/h)"), "Fails");
    assert_eq!(v["verdicts"]["A(1/h)"]["certificate"]["witness1"], "x2^2*x3");
}

#[test]
fn surface_annihilators_and_relation() {
    let (v, code) = json(&["verify-ann", "--vars", "x1,x2,x3", "--poly", "(x1-x2*x3)*(x1^3+x2^3)"]);
    assert_eq!(code, 0);
    assert_eq!(verdict(&v, "annihilation"), "Holds");
    assert_eq!(verdict(&v, "relation"), "Holds");
}

#[test]
fn conormal_of_normal_crossing() {
    let (v, code) = json(&["conormal", "--poly", "x1*x2"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdicts"]["conormal"]["certificate"]["g01"], "x1*xi1 - x2*xi2");
    assert_eq!(verdict(&v, "W"), "Holds");
}

#[test]
fn fixture_corpus_passes() {
    let out = dcond(&["corpus", fixtures().to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() >= 20);
}

#[test]
fn corpus_reports_mismatch() {
    let dir = std::env::temp_dir().join(format!("dcond-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        dir.join("wrong.toml"),
        "[[case]]\nname = \"wrong\"\npoly = \"x1^2+x2^4+x3^4\"\nexpect = { B = \"holds\" }\n",
    )
    .unwrap();
    let out = dcond(&["corpus", dir.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("expected holds, got fails"));
}
