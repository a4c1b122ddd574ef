use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blockop::report::{Outcome, Report, SCHEMA};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockop"))
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_spec(file: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = vec![args[0], file.to_str().unwrap()];
    all.extend_from_slice(&args[1..]);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn shipped_specs_run_clean() {
    for name in ["lcal.spec", "coupled.spec", "regrouped.spec"] {
        let o = run_spec(&spec(name), &["run"]);
        assert_eq!(o.status.code(), Some(0), "{name}:\n{}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).starts_with("blockop "));
    }
}

#[test]
fn adjoint_of_l0_is_l() {
    let o = run_spec(&spec("lcal.spec"), &["adjoint", "L0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict: L0* = L  [info]"), "{out}");
    assert!(out.contains("-D^2 on H^2"));
}

#[test]
fn examples_match_golden_output() {
    let o = run(&["examples"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("golden/examples.txt");
    assert_eq!(stdout(&o), golden);
}

#[test]
fn json_report_round_trips() {
    let o = run_spec(&spec("coupled.spec"), &["run", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.schema, SCHEMA);
    assert_eq!(r.settings.seed, 1);
    assert_eq!(r.results.len(), 2);
    let adj = &r.results[1];
    assert!(adj.details.iter().any(|(k, v)| k == "witness" && v == "(x1, -x1) with x1 ∉ H^1"));
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn json_file_and_text_together() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run_spec(&spec("lcal.spec"), &["check-adjoint", "Lcal", "--json", path.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed 7"));
    let r = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.settings.seed, 7);
    assert_eq!(r.results[0].outcome, Outcome::Proved);
}

#[test]
fn refuted_verdict_exits_one() {
    let o = run_spec(&spec("lcal.spec"), &["check-sa", "Lcal"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("[refuted]"));
}

#[test]
fn unknown_verdict_exits_two() {
    let f = scratch("[block T]\nrow = LD; LD\nrow = LD; LD\n");
    let o = run_spec(f.path(), &["check-sa", "T"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn undefined_name_prints_no_partial_report() {
    let f = scratch("[run]\nadjoint L0\nadjoint Nope\n");
    let o = run_spec(f.path(), &["run"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("Nope"), "{}", stderr(&o));

    let o = run_spec(&spec("lcal.spec"), &["check-sa", "Missing"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stdout(&o).is_empty());
}

#[test]
fn parse_error_reports_position() {
    let f = scratch("[operator A]\nexpr = iD\nbc = f(2) = 0\n");
    let o = run_spec(f.path(), &["print"]);
    assert_eq!(o.status.code(), Some(65));
    let err = stderr(&o);
    assert!(err.contains(":3:"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn missing_file_is_an_io_error() {
    let o = run(&["run", "/nonexistent/blockop.spec"]);
    assert_eq!(o.status.code(), Some(66));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    let f = spec("regrouped.spec");
    let o = run_spec(&f, &["factorize", "A", "--lambda", "2i", "--side", "3"]);
    assert_eq!(o.status.code(), Some(64));
    let o = run_spec(&f, &["factorize", "A", "--lambda", "two"]);
    assert_eq!(o.status.code(), Some(64));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn factorize_reports_the_residual() {
    let f = scratch("[block T]\nrow = LD; M0\nrow = M0; LD\n");
    let o = run_spec(f.path(), &["factorize", "T", "--lambda", "-2i", "--galerkin", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("schur complement"));
    assert!(out.contains("corrupted_residual"));
}

#[test]
fn print_is_canonical_and_stable() {
    let o = run_spec(&spec("regrouped.spec"), &["print"]);
    assert_eq!(o.status.code(), Some(0));
    let once = stdout(&o);
    let f = scratch(&once);
    let twice = stdout(&run_spec(f.path(), &["print"]));
    assert_eq!(once, twice);
}
