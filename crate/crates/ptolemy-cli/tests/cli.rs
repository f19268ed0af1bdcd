use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptolemy")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "one report line");
    serde_json::from_str(&text).unwrap()
}

#[test]
fn eval_identity_words() {
    for w in ["aaaa", "", "bbb", "(ba)^5"] {
        assert_eq!(report(&["eval", w])["output"]["identity"], true, "{w}");
    }
    assert_eq!(report(&["eval", "ab"])["output"]["identity"], false);
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["--json", "eval", "ab"]);
    let b = run(&["--json", "eval", "ab"]);
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["version"], ptolemy::VERSION);
    assert_eq!(r["configHash"].as_str().unwrap().len(), 64);
    assert!(r.get("timings").is_none());
    let t: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert!(t["timings"]["elapsedMs"].is_number());
    let c = run(&["--json", "analyze", "departure", "--samples", "5", "--seed", "9"]);
    let d = run(&["--json", "analyze", "departure", "--samples", "5", "--seed", "9"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn word_problem() {
    for w in ["aaaa", "bbb", "(ba)^5", "babababababab"] {
        assert_eq!(report(&["wp", w])["output"]["trivial"], w != "babababababab", "{w}");
    }
    let r = report(&["wp", "a"]);
    assert_eq!(r["output"]["trivial"], false);
    assert!(r["output"]["witness"]["treePair"].is_object());
}

#[test]
fn star_pentagon_has_a_kernel_braid() {
    let r = report(&["--star", "wp", "(ba)^5"]);
    let out = &r["output"];
    assert_eq!(out["trivial"], false);
    assert_eq!(out["projectionTrivial"], true);
    let braid = out["witness"]["kernelBraid"].as_array().unwrap();
    assert_eq!(braid.len(), 1);
    assert_eq!(braid[0]["e"], "root");
    assert_eq!(braid[0]["f"], "hL");
    assert_eq!(braid[0]["sign"], 1);
    assert_eq!(r["config"]["mode"], "Tstar");
}

#[test]
fn multiplication_and_inverse() {
    let p = report(&["mult", "ab", "BA"]);
    assert_eq!(p["output"]["identity"], true);
    let q = report(&["mult", "ab", "a"]);
    assert_eq!(q["output"]["fingerprint"], report(&["eval", "aba"])["output"]["fingerprint"]);
    let i = report(&["inv", "abb"]);
    let w = i["output"]["word"].as_str().unwrap().to_string();
    assert_eq!(report(&["mult", "abb", &w])["output"]["identity"], true);
    let s = report(&["--star", "inv", "(ba)^5"]);
    let ws = s["output"]["word"].as_str().unwrap().to_string();
    assert_eq!(report(&["--star", "mult", "(ba)^5", &ws])["output"]["identity"], true);
}

#[test]
fn combing_output() {
    assert_eq!(report(&["comb", ""])["output"]["moves"], "");
    let r = report(&["comb", "abAB", "--reduced", "--emit-trace"]);
    assert!(r["output"]["trace"].is_array());
    assert!(r["input"]["reduced"].as_bool().unwrap());
    let s = report(&["--star", "comb", "(ba)^5"]);
    assert_eq!(s["output"]["kernelBraid"].as_array().unwrap().len(), 1);
}

#[test]
fn analysis_commands() {
    let p = report(&["analyze", "polygon-diameter", "8"]);
    assert!(p["output"]["diameter"].as_u64().unwrap() < 30);
    assert_eq!(p["output"]["diameter"], p["output"]["diameterByMatrix"]);
    let f = report(&["analyze", "flipdist", "7"]);
    assert_eq!(f["output"]["diameter"], 5);
    let c = report(&["analyze", "corridor", "ab", "aba", "--kmax", "30"]);
    assert_eq!(c["output"]["outcome"], "feasible");
    let s = report(&["analyze", "corridor", "--samples", "5", "--seed", "2"]);
    assert_eq!(s["output"]["pairs"], 10);
    assert_eq!(s["config"]["seed"], 2);
}

#[test]
fn exit_codes() {
    let bad = run(&["eval", "abz"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("position 2"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["analyze", "corridor", "ab"]).status.code(), Some(1));
    // a ball radius of zero and no bidirectional search leaves loose bounds
    let loose = run(&["analyze", "corridor", "abababab", "babababa", "--kmax", "0", "--radius", "0", "--oracle-depth", "0"]);
    assert_eq!(loose.status.code(), Some(2));
}
