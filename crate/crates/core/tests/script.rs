mod common;

use std::process::Command;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use tangentia::script::{eval_element, eval_endomorphism, parse, run_source, RunOptions, ScriptError, SCHEMA};
use tangentia::{corpus, Element, Endomorphism, VarietyKind};

fn run(src: &str) -> Result<tangentia::script::Report, ScriptError> {
    run_source(src, &RunOptions::default())
}

#[test]
fn nagata_json() {
    let r = run(corpus::source("nagata").unwrap()).unwrap();
    let j = r.to_json();
    assert_eq!(j["schema"], SCHEMA);
    assert_eq!(j["generators"], serde_json::json!(["x", "y", "z"]));
    let div = j["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["command"] == "divergence")
        .unwrap();
    assert_eq!(div["divergence"], "0");
    assert_eq!(div["zero"], true);
}

#[test]
fn bergman_verdict() {
    let j = run(corpus::source("bergman").unwrap()).unwrap().to_json();
    let dw = j["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["command"] == "detect-wild")
        .unwrap();
    assert_eq!(dw["verdict"], "absolutely-wild");
    assert_eq!(dw["context"]["min_degree"], 5);
}

#[test]
fn every_corpus_script_runs() {
    for name in corpus::names() {
        let r = run(corpus::source(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!r.results().is_empty(), "{name}");
    }
}

#[test]
fn output_is_deterministic() {
    for name in corpus::names() {
        let src = corpus::source(name).unwrap();
        let a = run(src).unwrap();
        let b = run(src).unwrap();
        assert_eq!(a.render_json(), b.render_json(), "{name}");
        assert_eq!(a.render_text(), b.render_text(), "{name}");
    }
}

#[test]
fn invert_then_compose() {
    let src = "variety associative(2) vars a, b;\n\
               phi := auto(a + b*b*b, b);\n\
               psi := invert phi --degree 4;\n\
               compose phi, psi --degree 4;\n";
    let j = run(src).unwrap().to_json();
    let res = j["results"].as_array().unwrap();
    assert_eq!(res[0]["command"], "compose");
    assert_eq!(res[0]["identity"], true);
}

#[test]
fn script_errors_have_positions() {
    let e = run("variety lie(2) vars x, y;\nbad := auto(x + 1, y);\n").unwrap_err();
    assert_eq!(e.pos().line, 2);
    assert_ne!(e.kind(), "invariant");

    let e = run("variety polynomial(2) vars x, y;\nf := x + ;\n").unwrap_err();
    assert_eq!(e.kind(), "syntax");
    assert_eq!(e.pos().line, 2);

    let e = run("variety lie(2) vars x, y;\nf := x * y;\n").unwrap_err();
    assert_eq!(e.kind(), "semantic");

    assert!(run("f := 1;").is_err());
    assert!(run("variety polynomial(2) vars x, x;").is_err());
    assert!(run("variety polynomial(2) vars x, y;\nx := y;").is_err());
    assert!(run("variety polynomial(2) vars x, y;\nf := x;\nf := y;").is_err());
    assert!(run("variety polynomial(2) vars x, y;\nfrobnicate x;").is_err());
}

#[test]
fn parse_statements() {
    let s = parse(corpus::source("tau").unwrap()).unwrap();
    assert!(s.statements.len() >= 4);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn elements_round_trip(seed in any::<u64>(), k in 0usize..4, n in 2usize..4) {
        let v = variety(all_kinds()[k], n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let e = random_element(v, 1, 4, 4, &mut r);
        let names = v.default_names();
        let back = eval_element(&e.display_with(&names), v, &names).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn endomorphisms_round_trip(seed in any::<u64>(), k in 0usize..4, n in 2usize..4) {
        let v = variety(all_kinds()[k], n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let phi: Endomorphism = random_ia(v, 1 + (seed % 3) as usize, &mut r);
        let names = v.default_names();
        let back = eval_endomorphism(&phi.display_with(&names), v, &names).unwrap();
        prop_assert_eq!(back, phi);
    }
}

#[test]
fn zero_prints_and_parses() {
    let v = variety(VarietyKind::Polynomial, 2);
    let names = v.default_names();
    assert_eq!(
        eval_element(&Element::zero(v).display_with(&names), v, &names).unwrap(),
        Element::zero(v)
    );
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tangentia"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn temp_script(name: &str, src: &str) -> String {
    let p = std::env::temp_dir().join(format!("tangentia-{}-{name}.tan", std::process::id()));
    std::fs::write(&p, src).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn cli_exit_codes() {
    let (code, out) = cli(&["run", "nagata", "--json"]);
    assert_eq!(code, 0);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["schema"], SCHEMA);

    let (code, out) = cli(&["run", "tau"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("variety metabelian(4)"));

    let bad = temp_script("bad", "variety lie(2) vars x, y;\nbad := auto(x + 1, y);\n");
    let (code, out) = cli(&["run", &bad, "--json"]);
    assert_eq!(code, 1);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["error"]["line"], 2);

    let (code, _) = cli(&["run", "/nonexistent/script.tan"]);
    assert_eq!(code, 1);

    let ok = temp_script(
        "ok",
        "variety polynomial(1) vars x;\nf := endo(x + x^2);\nchain-rule f, f;\ninvert auto(x^2 + x) --degree 3;\n",
    );
    assert_eq!(cli(&["run", &ok]).0, 0);
    let sing = temp_script("sing", "variety polynomial(2) vars x, y;\ninvert endo(x*y, y);\n");
    assert_eq!(cli(&["run", &sing]).0, 1);
}

#[test]
fn invariant_errors_are_internal() {
    let e = ScriptError::Runtime {
        pos: tangentia::script::Pos { line: 1, col: 1 },
        source: tangentia::Error::Invariant("composite is not the identity".into()),
    };
    assert!(e.is_internal());
    assert_eq!(e.kind(), "invariant");
}
