mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use omtbdd::bits::BitString;
use omtbdd::diagram::Omtbdd;
use omtbdd::learner::{learn, LearnerConfig};
use omtbdd::oracles::oracles_from_target;
use omtbdd::sweep::{cell_means, run_sweep, run_trial, Axis, SweepSpec};

const BIN: &str = env!("CARGO_BIN_EXE_omtbdd");
const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('=')).unwrap_or_else(|| panic!("no {key}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_learn() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("t.dd");
    let learned = dir.path().join("h.dd");
    ok(&["gen", "--n", "40", "--m", "30", "--k", "5", "--seed", "9", "--out", path(&target)]);
    let d = Omtbdd::from_document(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(d.node_count(), 40);

    let out = ok(&[
        "learn",
        "--target",
        path(&target),
        "--cache-mq",
        "--check-invariants",
        "--out",
        path(&learned),
    ]);
    assert_eq!(field(&out, "nodes"), "40");
    assert_eq!(field(&out, "exact"), "true");
    let mq: u64 = field(&out, "mq").parse().unwrap();
    let distinct: u64 = field(&out, "mq_distinct").parse().unwrap();
    assert!(distinct <= mq && mq <= field(&out, "mq_bound").parse().unwrap());
    assert!(field(&out, "eq").parse::<u64>().unwrap() <= 40);

    let h = Omtbdd::from_document(&fs::read_to_string(&learned).unwrap()).unwrap();
    assert!(h.same_structure(&d));
    assert_eq!(ok(&["equiv", path(&target), path(&learned)]), "YES\n");
}

#[test]
fn learn_writes_events() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("events.jsonl");
    let target = format!("{DATA}/running.dd");
    let out = ok(&["learn", "--target", &target, "--events", path(&events)]);
    let lines = fs::read_to_string(&events).unwrap();
    assert!(lines.lines().count() > 0);
    for line in lines.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    assert_eq!(field(&out, "nodes"), "9");
}

#[test]
fn eval_matches_the_library() {
    let target = format!("{DATA}/running.dd");
    let d = Omtbdd::from_document(&fs::read_to_string(&target).unwrap()).unwrap();
    for x in (0..256u64).step_by(7) {
        let a = BitString::from_index(x, 8);
        let out = ok(&["eval", &target, "--input", &a.to_string()]);
        assert_eq!(out.trim(), d.eval(&a).unwrap().to_string());
        assert_eq!(out.trim(), common::walk(&d, x).to_string());
    }
}

#[test]
fn equiv_reports_a_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let target = format!("{DATA}/running.dd");
    let other = dir.path().join("o.dd");
    fs::write(&other, Omtbdd::constant(8, 3, 1).to_document()).unwrap();
    let out = ok(&["equiv", &target, path(&other)]);
    let ce: BitString = out.trim().strip_prefix("NO ").unwrap().parse().unwrap();
    let d = Omtbdd::from_document(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_ne!(d.eval(&ce).unwrap(), 1);
    assert_eq!(ok(&["equiv", &target, &target]), "YES\n");
}

#[test]
fn reduce_and_dot() {
    let target = format!("{DATA}/running.dd");
    let reduced = ok(&["reduce", &target]);
    let d = Omtbdd::from_document(&reduced).unwrap();
    let original = Omtbdd::from_document(&fs::read_to_string(&target).unwrap()).unwrap();
    assert!(d.same_structure(&original.reduce()));
    let dot = ok(&["dot", &target]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 2 * 6);
}

#[test]
fn deterministic_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "sweep".to_string(),
            "--axis=nodes".into(),
            "--grid=10,20".into(),
            "--m=24".into(),
            "--k=4".into(),
            "--trials=3".into(),
            "--seed=5".into(),
            "--deterministic".into(),
            format!("--csv={}", p.display()),
        ]
    };
    let a_args = args(&a);
    let b_args = args(&b);
    ok(&a_args.iter().map(String::as_str).collect::<Vec<_>>());
    ok(&b_args.iter().map(String::as_str).collect::<Vec<_>>());
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 1 + 6);
}

#[test]
fn compile_forest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("forest.dd");
    let report = ok(&[
        "compile",
        "--classifier",
        &format!("{DATA}/forest.txt"),
        "--data",
        &format!("{DATA}/flowers.csv"),
        "--out",
        path(&out),
    ]);
    assert_eq!(field(&report, "agreement"), "1.0000");
    let conds: usize = field(&report, "distinct_conditions").parse().unwrap();
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("# x")).count(), conds);
    let d = Omtbdd::from_document(&text).unwrap();
    assert_eq!(d.m(), conds);
    assert_eq!(d.node_count().to_string(), field(&report, "nodes"));

    let exact = ok(&["compile", "--classifier", &format!("{DATA}/forest.txt"), "--exact"]);
    assert_eq!(field(&exact, "distinct_conditions"), conds.to_string());
}

#[test]
fn failures_exit_nonzero() {
    let missing = run(&["eval", "/nonexistent/x.dd", "--input", "0"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));
    let bad_input = run(&["eval", &format!("{DATA}/running.dd"), "--input", "012"]);
    assert!(!bad_input.status.success());
    let short_input = run(&["eval", &format!("{DATA}/running.dd"), "--input", "01"]);
    assert!(!short_input.status.success());
    let infeasible = run(&["gen", "--n", "3", "--m", "1", "--k", "9"]);
    assert!(!infeasible.status.success());
    assert!(!run(&["sweep", "--axis", "sideways", "--grid", "1"]).status.success());
}

#[test]
fn sweep_stays_within_bounds_at_scale() {
    let mut spec = SweepSpec::new(Axis::Nodes, vec![25, 50, 100], 0, 512, 8);
    spec.trials = 2;
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert!(!r.bound_violation && r.mq <= r.mq_bound && r.eq <= r.eq_bound);
        assert_eq!(r.n, r.axis_value);
    }
    let means = cell_means(&rows);
    assert!(means.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn single_cell_sweep_equals_direct_learning() {
    let mut spec = SweepSpec::new(Axis::Vars, vec![40], 30, 0, 5);
    spec.trials = 1;
    spec.seed = 123;
    spec.deterministic = true;
    let row = &run_sweep(&spec).unwrap()[0];
    let target = omtbdd::generator::generate(&omtbdd::generator::GenParams::new(30, 40, 5, 123)).unwrap();
    let (mut mq, mut eq) = oracles_from_target(&target);
    let out = learn(40, &mut mq, &mut eq, &LearnerConfig::default()).unwrap();
    assert_eq!((row.mq, row.eq), (out.mq, out.eq));
    let direct = run_trial(30, 40, 5, 123).unwrap();
    assert_eq!((direct.mq, direct.eq, direct.seed), (row.mq, row.eq, 123));
}
