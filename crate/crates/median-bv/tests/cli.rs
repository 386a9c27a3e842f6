//! End-to-end checks of the binary: document parsing, output formatting,
//! and exit-code discipline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_median-bv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Fixtures {
    _dir: tempfile::TempDir,
    triod: PathBuf,
    dip: PathBuf,
}

fn fixtures() -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let triod = write(
        dir.path(),
        "triod.json",
        r#"{"kind": "tree", "n": 4, "edges": [[0, 3], [1, 3], [2, 3]]}"#,
    );
    let dip = write(dir.path(), "dip.json", r#"{"values": [1.0, 0.0, 1.0, 1.0]}"#);
    Fixtures { _dir: dir, triod, dip }
}

#[test]
fn variation_of_the_dip_function_is_one() {
    let fx = fixtures();
    let out = run(&["var", fx.triod.to_str().unwrap(), fx.dip.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn relaxed_leaf_variation_is_two() {
    let fx = fixtures();
    let out = run(&[
        "var",
        fx.triod.to_str().unwrap(),
        fx.dip.to_str().unwrap(),
        "--sigma",
        "0,1,2",
        "--relaxed",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2\n");
}

#[test]
fn strict_mode_rejects_the_leaf_set_as_input_error() {
    let fx = fixtures();
    let out = run(&[
        "var",
        fx.triod.to_str().unwrap(),
        fx.dip.to_str().unwrap(),
        "--sigma",
        "0",
        "1",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not a subalgebra"), "stderr: {err}");
}

#[test]
fn linear_variation_picks_the_best_leaf_pair() {
    let fx = fixtures();
    let out = run(&["linvar", fx.triod.to_str().unwrap(), fx.dip.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn check_reports_the_square_splitting_failure() {
    let dir = tempfile::tempdir().unwrap();
    let square = write(dir.path(), "square.json", r#"{"kind": "grid", "width": 2, "height": 2}"#);
    let out = run(&["check", square.to_str().unwrap()]);
    // The square is a median algebra, so the exit stays 0; the report still
    // names the failed law and its first witness.
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("B3 violations=8 first=0,1,3,2"), "report: {text}");
    assert!(text.contains("median pretree: no"), "report: {text}");
}

#[test]
fn check_flags_a_broken_table_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // m(x,y,z) = x is not symmetric in its arguments.
    let mut table = Vec::with_capacity(8);
    for x in 0..2 {
        for _ in 0..4 {
            table.push(x);
        }
    }
    let doc = format!(r#"{{"kind": "table", "n": 2, "table": {table:?}}}"#);
    let broken = write(dir.path(), "broken.json", &doc);
    let out = run(&["check", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("violations"), "report: {text}");
}

#[test]
fn grid_points_accept_row_column_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.json", r#"{"kind": "grid", "width": 3, "height": 2}"#);
    let out = run(&["median", grid.to_str().unwrap(), "0,0", "1,2", "0,2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2\n");
}

#[test]
fn topology_lists_every_open_set_of_a_two_chain() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain.json", r#"{"kind": "chain", "n": 2}"#);
    let out = run(&["topology", chain.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "\n0\n1\n0 1\n");
}

#[test]
fn witness_appears_exactly_when_unfragmented() {
    let dir = tempfile::tempdir().unwrap();
    let indiscrete = write(dir.path(), "indiscrete.json", r#"{"n": 2, "opens": [[], [0, 1]]}"#);
    let f = write(dir.path(), "f.json", r#"{"values": [0.0, 1.0]}"#);
    let out = run(&["fragmented", indiscrete.to_str().unwrap(), f.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "fragmented: no\n");
    let out = run(&["witness", indiscrete.to_str().unwrap(), f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("y: 0 1\n"), "witness: {text}");

    let fx = fixtures();
    let out = run(&["witness", fx.triod.to_str().unwrap(), fx.dip.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "no witness\n");
}

#[test]
fn limit_probe_reports_the_increment_trend() {
    let out = run(&["limit-probe", "star", "geometric", "--max", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n=1 value=0.5"), "probe: {text}");
    assert!(text.contains("n=4 value=0.9375"), "probe: {text}");
    assert!(text.contains("strictly increasing: yes"), "probe: {text}");
    assert!(text.contains("increments: vanishing"), "probe: {text}");
}

#[test]
fn proptest_runs_a_suite_and_exits_clean() {
    let out = run(&["proptest", "--suite", "chain", "--seed", "7", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[chain] classical-telescoping trials=20 failures=0"));
    assert!(text.contains("result: pass"));
}

#[test]
fn malformed_documents_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let junk = write(dir.path(), "junk.json", "{ not json");
    let out = run(&["check", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let fx = fixtures();
    let out = run(&["var", fx.triod.to_str().unwrap(), fx.triod.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["proptest", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["var"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["limit-probe", "ladder", "geometric", "--max", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
