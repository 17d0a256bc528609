//! End-to-end tests of the `revsynth` binary: golden outputs, exit codes
//! and byte determinism.

use std::path::Path;
use std::process::{Command, Output};

fn revsynth(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revsynth"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to run binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn synth_factored_benchmark_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = revsynth(
        &[
            "synth",
            "--builtin",
            "4mod5",
            "--method",
            "factor",
            "--no-restore",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let expected = "\
.numvars 5
.variables x0 x1 x2 x3 f
.begin
t1 f
t2 x0 x2
t2 x1 x3
t3 x2 x3 f
t2 x2 x3
t2 x3 f
.end
gates=6 cost_naive=10 cost_reduced=8 restored=false verified=true
";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn synth_direct_benchmark_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = revsynth(
        &[
            "synth",
            "--builtin",
            "hbfr6",
            "--method",
            "direct",
            "--cost",
            "naive",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("gates=16 cost_naive=208 restored=true verified=true\n"));
}

#[test]
fn synth_empty_expression_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.pprm"), "vars: 3\n0\n").unwrap();
    let out = revsynth(
        &["synth", "--input", "empty.pprm", "--method", "direct"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("gates=0 "));
}

#[test]
fn synth_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["synth", "--builtin", "2of5", "--method", "factor"];
    let first = revsynth(&args, dir.path());
    let second = revsynth(&args, dir.path());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn synth_requires_exactly_one_source() {
    let dir = tempfile::tempdir().unwrap();
    let out = revsynth(&["synth"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = revsynth(
        &["synth", "--builtin", "4mod5", "--input", "x.pprm"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transform_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.pprm"), "x0*x1\n").unwrap();
    let out = revsynth(&["transform", "--input", "f.pprm"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "vars: 2\n0001\n");

    std::fs::write(dir.path().join("t.tt"), "vars: 2\n0001\n").unwrap();
    let out = revsynth(&["transform", "--input", "t.tt"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "vars: 2\nx0*x1\n");

    // all-zero table converts to the zero expression
    std::fs::write(dir.path().join("z.tt"), "vars: 2\n0000\n").unwrap();
    let out = revsynth(&["transform", "--input", "z.tt"], dir.path());
    assert_eq!(stdout(&out), "vars: 2\n0\n");

    // the exactly-two-of-five table converts to its 20-term expansion
    let table = revsynth::pprm::write_table_file(&revsynth::pprm::TruthTable::from_fn(5, |x| {
        x.count_ones() == 2
    }));
    std::fs::write(dir.path().join("two.tt"), table).unwrap();
    let out = revsynth(&["transform", "--input", "two.tt"], dir.path());
    let expr = revsynth::pprm::read_pprm_file(&stdout(&out)).unwrap();
    assert_eq!(expr, revsynth::pprm::builtin("2of5").unwrap());
    assert_eq!(expr.term_count(), 20);
}

#[test]
fn transform_round_trip_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    // scrambled input normalizes to the canonical form
    std::fs::write(dir.path().join("m.pprm"), "x2*x0 + x1 + x0*x2\n").unwrap();
    let out = revsynth(
        &["transform", "--input", "m.pprm", "--out", "m.tt"],
        dir.path(),
    );
    assert!(out.status.success());
    let out = revsynth(&["transform", "--input", "m.tt"], dir.path());
    assert_eq!(stdout(&out), "vars: 3\nx1\n");
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.pprm"), "vars: 3\nx0*x1 + x2\n").unwrap();
    let synth = revsynth(
        &["synth", "--input", "f.pprm", "--out", "c.real"],
        dir.path(),
    );
    assert!(synth.status.success());
    let ok = revsynth(
        &["verify", "--circuit", "c.real", "--function", "f.pprm"],
        dir.path(),
    );
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("equivalent"));

    // tamper: retarget one gate
    let netlist = std::fs::read_to_string(dir.path().join("c.real")).unwrap();
    let tampered = netlist.replace("t3 x0 x1 f", "t3 x0 x2 f");
    assert_ne!(netlist, tampered);
    std::fs::write(dir.path().join("bad.real"), tampered).unwrap();
    let bad = revsynth(
        &["verify", "--circuit", "bad.real", "--function", "f.pprm"],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("not equivalent: assignment="));
}

#[test]
fn bench_default_set_reproduces_published_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = revsynth(&["bench", "--no-restore"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("4mod5"));
    // Direct and factorization columns for the three benchmarks
    for needle in [
        "4mod5      4       direct  9      25",
        "2of5       5       direct  20     180",
        "hbfr6      6       direct  16     208",
        "hbfr6      6       factor  13     85",
    ] {
        assert!(text.contains(needle), "missing `{needle}` in:\n{text}");
    }
    // 4mod5 factorization: 6 gates at reduced cost 8
    assert!(text.contains("4mod5      4       factor  6      10          8"));
}

#[test]
fn bench_csv_format_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = revsynth(
        &[
            "bench",
            "4mod5",
            "--no-restore",
            "--format",
            "csv",
            "--out",
            "r.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("benchmark,inputs,method,"));
    assert!(csv.contains("4mod5,4,factor,6,10,8,true,false"));
}

#[test]
fn bench_accepts_user_files_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("user.pprm"), "vars: 4\nx0*x1 + x2*x3\n").unwrap();
    let out = revsynth(&["bench", "user.pprm", "4mod5", "--jobs", "3"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let user_line = text.lines().position(|l| l.starts_with("user.pprm"));
    let mod_line = text.lines().position(|l| l.starts_with("4mod5"));
    assert!(
        user_line.unwrap() < mod_line.unwrap(),
        "rows must keep input order"
    );
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.pprm"), "x0 + y1\n").unwrap();
    let out = revsynth(&["synth", "--input", "bad.pprm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = revsynth(&["transform", "--input", "missing.pprm"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = revsynth(&["synth", "--builtin", "unknown"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
