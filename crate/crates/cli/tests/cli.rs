//! End-to-end tests of the command-line binary: subcommand behaviour, exit
//! codes, and printed probability values.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pdtlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().to_string()
}

/// Parse a printed probability: `p/q`, an integer, or `d.dddde-d approx`.
fn value(text: &str) -> f64 {
    let line = text.lines().last().unwrap().trim();
    let num = line.strip_suffix(" approx").unwrap_or(line);
    if let Some((p, q)) = num.split_once('/') {
        p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap()
    } else {
        num.parse::<f64>().unwrap()
    }
}

#[test]
fn construct_and_check_report_properties() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "td.pdt");
    let r = run(&[
        "construct",
        "--strategy",
        "top_down",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let r = run(&["check", "--cpp", "--spp", &out]);
    assert_eq!(r.status.code(), Some(0));
    let text = stdout(&r);
    assert!(text.contains("CPP: yes"));
    assert!(text.contains("SPP: yes"));
}

#[test]
fn check_reports_missing_spp_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "lr0.pdt");
    run(&[
        "construct",
        "--strategy",
        "lr0",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    let r = run(&["check", "--spp", &out]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("SPP: no"));
}

#[test]
fn lift_prob_and_prefix_print_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "elc.ppdt");
    let r = run(&[
        "lift",
        "--strategy",
        "eps_left_corner",
        fixture("g_wr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    for (input, expect) in [("b", 1.0 / 3.0), ("c", 1.0 / 6.0), ("a a b", 1.0 / 27.0)] {
        let r = run(&["prob", &out, "--input", input]);
        assert_eq!(r.status.code(), Some(0));
        assert!((value(&stdout(&r)) - expect).abs() < 1e-9, "prob {input}");
    }
    for (input, expect) in [("a", 0.5), ("", 1.0), ("a b", 1.0 / 9.0)] {
        let r = run(&["prefix", &out, "--input", input]);
        assert_eq!(r.status.code(), Some(0));
        assert!((value(&stdout(&r)) - expect).abs() < 1e-9, "prefix {input}");
    }
}

#[test]
fn prob_is_exact_on_the_rational_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "td.ppdt");
    run(&[
        "lift",
        "--strategy",
        "top_down",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    let r = run(&["prob", &out, "--input", "a x d b x c"]);
    assert_eq!(stdout(&r).trim(), "4/9");
    let r = run(&["prefix", &out, "--input", "a x"]);
    assert_eq!(stdout(&r).trim(), "1");
}

#[test]
fn lift_refuses_lr_strategies_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "no.ppdt");
    let r = run(&[
        "lift",
        "--strategy",
        "lr0",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("not possible"));
}

#[test]
fn analyze_reports_the_forced_ratio_conflict() {
    let r = run(&[
        "analyze",
        "--strategy",
        "lr0",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "--probe",
        "a x c b x d",
        "--probe",
        "a x d b x c",
    ]);
    assert_eq!(r.status.code(), Some(1));
    let text = stdout(&r);
    assert!(text.contains("grammar ratio 1/4, forced automaton ratio 1"));
    assert!(text.contains("verdict: infeasible"));
    let r = run(&[
        "analyze",
        "--strategy",
        "top_down",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "--probe",
        "a x c b x d",
        "--probe",
        "a x d b x c",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).contains("not refuted"));
}

#[test]
fn estimate_writes_relative_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let grammar = path(&dir, "g.cfg");
    std::fs::write(
        &grammar,
        "start S\nrule r0: S -> T\nrule r1: T -> a T\nrule r2: T -> b\n",
    )
    .unwrap();
    let corpus = path(&dir, "c.txt");
    std::fs::write(&corpus, "r0 r1 r2\nr0 r2\nr0 r1 r1 r2\n").unwrap();
    let out = path(&dir, "g.pcfg");
    let r = run(&["estimate", &grammar, &corpus, "-o", &out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("rule r0: S -> T : 1"), "{text}");
    assert!(text.contains("rule r1: T -> a T : 1/2"), "{text}");
    assert!(text.contains("rule r2: T -> b : 1/2"), "{text}");
}

#[test]
fn enumerate_lists_derivations_with_probabilities() {
    let r = run(&[
        "enumerate",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "--max-steps",
        "10",
    ]);
    assert_eq!(r.status.code(), Some(0));
    let text = stdout(&r);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("pi_S pi_A1 pi_C pi_B1 pi_C => a x c b x c : 2/9"));
}

#[test]
fn enumerate_lists_automaton_computations() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "td.ppdt");
    run(&[
        "lift",
        "--strategy",
        "top_down",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &out,
    ]);
    let r = run(&["enumerate", &out, "--input", "a x c b x c", "--max-steps", "60"]);
    assert_eq!(r.status.code(), Some(0));
    let text = stdout(&r);
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("pi_S pi_A1 pi_C pi_B1 pi_C"), "{text}");
    assert!(text.trim_end().ends_with(": 2/9"), "{text}");
}

#[test]
fn malformed_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.cfg");
    std::fs::write(&bad, "rule r1 S -> a\n").unwrap();
    let r = run(&[
        "construct",
        "--strategy",
        "top_down",
        &bad,
        "-o",
        &path(&dir, "out.pdt"),
    ]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&[
        "construct",
        "--strategy",
        "nosuch",
        fixture("g_lr.pcfg").to_str().unwrap(),
        "-o",
        &path(&dir, "out.pdt"),
    ]);
    assert_eq!(r.status.code(), Some(2));
}
