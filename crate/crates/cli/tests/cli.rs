//! The `elho` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name]
        .iter()
        .collect();
    p.to_str().unwrap().to_string()
}

fn elho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elho"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn query_prints_certain_answers() {
    let o = elho(&[
        "query",
        "--kb",
        &fixture("example2.kb"),
        "--query",
        &fixture("q1.cq"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(kr, john)\n");
}

#[test]
fn explain_shows_the_rejected_cycle() {
    let o = elho(&[
        "query",
        "--kb",
        &fixture("example2.kb"),
        "--query",
        &fixture("q3.cq"),
        "--explain",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "false\nmatch {y↦aux:advisor:Prof} spurious: reason c\n"
    );
}

#[test]
fn explain_marks_genuine_matches() {
    let o = elho(&[
        "query",
        "--kb",
        &fixture("example2.kb"),
        "--query",
        &fixture("q1.cq"),
        "--explain",
    ]);
    let out = stdout(&o);
    assert!(out.contains("match {x1↦kr, x2↦john} accepted\n"), "{out}");
    assert!(out.contains("spurious: reason a\n"), "{out}");
}

#[test]
fn sat_exit_codes() {
    let o = elho(&["sat", "--kb", &fixture("unsat_example.kb")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSATISFIABLE\n");
    let o = elho(&["sat", "--kb", &fixture("example2.kb")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "SATISFIABLE\n");
}

#[test]
fn query_over_unsatisfiable_kb() {
    let o = elho(&[
        "query",
        "--kb",
        &fixture("unsat_example.kb"),
        "--query",
        &fixture("q1.cq"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "UNSATISFIABLE\n");
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(elho(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(elho(&["sat"]).status.code(), Some(2));
    assert_eq!(
        elho(&["sat", "--kb", "/nonexistent/kb"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kb");
    std::fs::write(&bad, "A SubClassOf\n").unwrap();
    let o = elho(&["sat", "--kb", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let badq = dir.path().join("bad.cq");
    std::fs::write(&badq, "q(x) :- eq(x,y).").unwrap();
    let o = elho(&[
        "query",
        "--kb",
        &fixture("example2.kb"),
        "--query",
        badq.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = elho(&[
        "materialize",
        "--kb",
        &fixture("example2.kb"),
        "--max-facts",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rewrite_and_materialize_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("prog.dl");
    let o = elho(&[
        "rewrite",
        "--kb",
        &fixture("example1.kb"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("eq(?x,john) :- JProf(?x).\n"));
    assert!(!text.contains("% equality"));
    let o = elho(&[
        "rewrite",
        "--kb",
        &fixture("example1.kb"),
        "--xi",
        "--equality",
    ]);
    let xi = stdout(&o);
    assert!(xi.contains("% equality"));
    assert!(!xi.contains("aux:"));

    let model = dir.path().join("model.txt");
    let o = elho(&[
        "materialize",
        "--kb",
        &fixture("example2.kb"),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dump = std::fs::read_to_string(&model).unwrap();
    assert!(dump.contains("taught(kr,john).\n"));
    let mut lines: Vec<&str> = dump.lines().collect();
    let n = lines.len();
    lines.sort();
    lines.dedup();
    assert_eq!(lines.len(), n);
}

#[test]
fn stats_text_and_machine() {
    let o = elho(&[
        "stats",
        "--kb",
        &fixture("example2.kb"),
        "--machine",
        "--query",
        &fixture("q3.cq"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in out.lines() {
        assert!(line.split_once('=').is_some(), "{line}");
    }
    assert!(out.contains("aux_constants=3\n"));
    assert!(out.contains("aux_set=2\n"));
    assert!(out.contains("spurious_c=1\n"));
    let o = elho(&["stats", "--kb", &fixture("example2.kb")]);
    assert!(stdout(&o).contains("true auxiliary"));
    let o = elho(&["stats", "--kb", &fixture("unsat_example.kb")]);
    assert_eq!(stdout(&o), "UNSATISFIABLE\n");
}

#[test]
fn gen_is_deterministic_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.kb");
    let o = elho(&[
        "gen",
        "--scale",
        "2",
        "--seed",
        "7",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let b = elho(&["gen", "--scale", "2", "--seed", "7"]);
    assert_eq!(std::fs::read_to_string(&a).unwrap(), stdout(&b));
    assert_eq!(
        elho(&["sat", "--kb", a.to_str().unwrap()]).status.code(),
        Some(0)
    );
    assert_eq!(elho(&["gen", "--scale", "0"]).status.code(), Some(2));

    let schema = dir.path().join("schema.kb");
    std::fs::write(&schema, "A SubClassOf B\n").unwrap();
    let o = elho(&["gen", "--scale", "1", "--tbox", schema.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn commands_are_reproducible() {
    let kb = fixture("example2.kb");
    for args in [
        vec!["rewrite", "--kb", kb.as_str()],
        vec!["materialize", "--kb", kb.as_str()],
        vec!["stats", "--kb", kb.as_str(), "--machine"],
    ] {
        assert_eq!(elho(&args).stdout, elho(&args).stdout);
    }
}
