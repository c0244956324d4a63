//! The binary driven as a subprocess on the shipped fixtures.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superfricke"))
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", "pairs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn normal_form_of_planted_osp_pair() {
    let o = run(&["normal-form", "--input", &fixture("osp_planted.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for key in ["lambda", "mu", "kappa", "psi", "xi"] {
        assert!(v["coords"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["normalA"]["entries"].as_array().map(Vec::len), Some(3));
    assert_eq!(v["conjugator"]["parity"], "even");
}

#[test]
fn scalar_pairs_take_the_sl2_route() {
    let o = run(&["normal-form", "--input", &fixture("sl2_unipotent.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["branch"], "unipotent");
    let o = run(&["normal-form", "--input", &fixture("sl2_generic.json"), "--mode", "float"]);
    assert_eq!(json(&o)["branch"], "diagonalizable");
}

#[test]
fn rejected_inputs_exit_2_with_a_message() {
    for name in ["central_a.json", "osp_nondiagonal_a.json"] {
        let o = run(&["normal-form", "--input", &fixture(name)]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{name}");
        assert!(o.stdout.is_empty());
    }
    assert_eq!(run(&["invariants", "--input", &fixture("osp_planted.json"), "--words", "AxB"]).status.code(), Some(2));
    assert_eq!(run(&["census", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--seed", "0xnope"]).status.code(), Some(2));
}

#[test]
fn invariants_keep_order_and_read_stdin() {
    let text = std::fs::read_to_string(fixture("osp_raw_matrix.json")).unwrap();
    let mut child =
        exe().args(["invariants", "--input", "-", "--words", "AB,A,,Bb"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["AB", "A", "", "Bb"]);
    // Bb is not reduced on input but evaluates to the identity.
    assert_eq!(v[""], v["Bb"]);
}

#[test]
fn eval_of_a_word_and_its_inverse_is_identity() {
    let o = run(&["eval", "--input", &fixture("osp_planted.json"), "--word", "ABba"]);
    assert_eq!(o.status.code(), Some(0));
    let id = run(&["eval", "--input", &fixture("osp_planted.json")]);
    assert_eq!(json(&o), json(&id));
}

#[test]
fn verify_json_and_failure_free_fast_suites() {
    let o = run(&["verify", "--suite", "osp", "--samples", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
    let o = run(&["verify", "--suite", "grassmann", "--mode", "float", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("checks passed"));
}

#[test]
fn small_census_is_deterministic() {
    let args = ["census", "--degree", "2", "--samples", "128", "--seed", "7", "--n", "4"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["count"]["total"], 9);
}
