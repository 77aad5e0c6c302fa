use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use rand::seq::SliceRandom;
use selp_core::gen::{chain_elp, random_elp, rng, ElpShape};
use selp_core::syntax::{render_elp, Dialect};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_selp-kit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default().as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn two_views_both_engines() {
    let path = fixture("two_views.easp");
    let p = path.to_str().unwrap();
    let oracle = run(&["solve", p, "--enumerate"], None);
    let reduce = run(&["solve", p, "--enumerate", "--engine", "reduce"], None);
    assert_eq!(code(&oracle), 10);
    assert_eq!(code(&reduce), 10);
    let want = "CONSISTENT\nWorld view 1: {$not$ p}\n  {q}\nWorld view 2: {$not$ q}\n  {p}\n";
    assert_eq!(stdout(&oracle), want);
    assert_eq!(stdout(&reduce), want);
}

#[test]
fn empty_program_is_consistent() {
    for engine in ["oracle", "reduce"] {
        let o = run(&["solve", "-", "--enumerate", "--engine", engine], Some(""));
        assert_eq!(code(&o), 10);
        assert_eq!(stdout(&o), "CONSISTENT\nWorld view 1: {}\n  {}\n");
    }
}

#[test]
fn quiet_mode_uses_exit_code_only() {
    let o = run(&["solve", "-", "--quiet"], Some("a :- not a.\n"));
    assert_eq!(code(&o), 20);
    assert!(o.stdout.is_empty());
    let o = run(&["solve", "-", "-q", "--engine", "reduce"], Some("a :- not a.\n"));
    assert_eq!(code(&o), 20);
}

#[test]
fn engines_agree_on_random_programs() {
    let mut r = rng(61);
    for _ in 0..40 {
        let text = render_elp(&random_elp(&mut r, &ElpShape::default()), Dialect::Not);
        if text.contains(":- .") {
            continue;
        }
        let a = run(&["solve", "-", "--enumerate"], Some(&text));
        let b = run(&["solve", "-", "--enumerate", "--engine", "reduce", "--bss", "td"], Some(&text));
        assert_eq!(code(&a), code(&b), "{text}");
        assert_eq!(stdout(&a), stdout(&b), "{text}");
    }
}

#[test]
fn errors_exit_with_one() {
    let o = run(&["solve", "-"], Some("p :- q\nr."));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(code(&run(&["group", "-"], Some("{not json"))), 1);
    assert_eq!(code(&run(&["solve", "/nonexistent/file.easp"], None)), 1);
}

#[test]
fn reduce_output_solves_to_same_verdict() {
    for (text, expected) in [("p :- $not$ q.\nq :- $not$ p.\n", 10), ("a :- not a.\n", 20), ("a.\n:- $not$ a.\n", 10)] {
        for extra in [&[][..], &["--decompose"], &["--bss", "td", "--decompose"]] {
            let mut args = vec!["reduce", "-", "--show"];
            args.extend_from_slice(extra);
            let asp = stdout(&run(&args, Some(text)));
            assert!(asp.contains("#show g/2."));
            assert_eq!(asp.contains("tmp_"), !extra.is_empty() && asp.contains("tmp_"));
            assert_eq!(code(&run(&["ground-solve", "-", "-q"], Some(&asp))), expected, "{text} {extra:?}");
        }
    }
}

#[test]
fn witnesses_group_back_into_world_views() {
    let asp = stdout(&run(&["reduce", fixture("two_views.easp").to_str().unwrap(), "--show"], None));
    let json = stdout(&run(&["ground-solve", "-", "--json"], Some(&asp)));
    let grouped = stdout(&run(&["group", "-"], Some(&json)));
    assert_eq!(grouped, "World view 1: {g(p,0), g(q,1)}\n  {p}\nWorld view 2: {g(p,1), g(q,0)}\n  {q}\n");
    let clasp = stdout(&run(&["group", fixture("two_views_clasp.json").to_str().unwrap()], None));
    assert_eq!(clasp, grouped);
}

#[test]
fn group_edge_cases() {
    assert_eq!(stdout(&run(&["group", "-"], Some("[]"))), "");
    let dup = r#"[["g(p,1)","v_check1(q,1)"],["v_check1(q,1)","g(p,1)"]]"#;
    assert_eq!(stdout(&run(&["group", "-"], Some(dup))), "World view 1: {g(p,1)}\n  {q}\n");
    let json = stdout(&run(&["group", "-", "--json"], Some(dup)));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["groups"][0]["members"][0][0], "q");
}

#[test]
fn qbf2elp_is_deterministic_and_decides_validity() {
    let path = fixture("tiny.qdimacs");
    let p = path.to_str().unwrap();
    let a = stdout(&run(&["qbf2elp", p, "--split-random", "--seed", "7"], None));
    let b = stdout(&run(&["qbf2elp", p, "--split-random", "--seed", "7"], None));
    assert_eq!(a, b);
    let elp = stdout(&run(&["qbf2elp", p], None));
    // ∃q1 ∀q2 ∃q3 (q1 ∨ q2 ∨ q3) ∧ (¬q2 ∨ ¬q3) is valid with q1 true.
    assert_eq!(code(&run(&["solve", "-", "-q"], Some(&elp))), 10);

    let cnf = "p cnf 3 2\n1 -2 0\n2 3 0\n";
    let split = stdout(&run(&["qbf2elp", "-", "--split-random", "--seed", "1"], Some(cnf)));
    for v in ["q1", "q2", "q3"] {
        assert!(
            split.lines().any(|l| l.starts_with(&format!("{v} ")) || l.starts_with(&format!("{v}."))),
            "{v} missing"
        );
    }
}

/// A chain whose rules are listed in seeded random order, so that
/// first-occurrence numbering scatters the atoms along the chain.
fn scrambled_chain(n: usize) -> String {
    let text = render_elp(&chain_elp(n, 3, 0), Dialect::Not);
    let mut lines: Vec<&str> = text.lines().collect();
    lines.shuffle(&mut rng(1));
    lines.join("\n")
}

fn stat(report: &str, key: &str) -> usize {
    let line = report.lines().find(|l| l.starts_with(key)).unwrap();
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

#[test]
fn stats_reports() {
    let ex = stdout(&run(&["stats", fixture("two_views.easp").to_str().unwrap()], None));
    assert_eq!(stat(&ex, "atoms:"), 2);
    assert_eq!(stat(&ex, "epistemic literals:"), 2);
    assert_eq!(stat(&ex, "primal width:"), 1);

    let empty = stdout(&run(&["stats", "-"], Some("")));
    assert_eq!(stat(&empty, "atoms:"), 0);
    assert_eq!(stat(&empty, "rules:"), 0);

    let report = stdout(&run(&["stats", "-"], Some(&scrambled_chain(20))));
    assert!(stat(&report, "max rule width (naive)") >= 20 / 2 - 5, "{report}");
    let short = stdout(&run(&["stats", "-"], Some(&scrambled_chain(10))));
    assert_eq!(stat(&report, "max rule width (td)"), stat(&short, "max rule width (td)"));

    let dot = stdout(&run(&["stats", "-", "--dot"], Some("p :- q.\n")));
    assert!(dot.contains("graph") && dot.contains("--"));
}

#[test]
fn convert_between_dialects() {
    let km = stdout(&run(&["convert", "-", "--from", "not", "--to", "km"], Some("p :- not $not$ q, $not$ not r.\n")));
    assert_eq!(km, "p :- K$ q, M$ r.\n");
    let back = stdout(&run(&["convert", "-", "--from", "km", "--to", "not"], Some(&km)));
    assert_eq!(back, "p :- not $not$ q, $not$ not r.\n");
    let o = run(&["solve", "-", "--dialect", "km", "-q"], Some(&km));
    assert_eq!(code(&o), 10);
}
