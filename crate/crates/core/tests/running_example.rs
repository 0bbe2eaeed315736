//! Step-by-step replay of the eight-variable worked example, checking each
//! intermediate hypothesis and classification tree.

mod common;

use omtbdd::bits::BitString;
use omtbdd::ctree::{Classification, TreeNode};
use omtbdd::diagram::Omtbdd;
use omtbdd::learner::{LearnerState, UpdateKind};
use omtbdd::oracles::{MembershipOracle, TargetMembership};

use common::RUNNING_TARGET;

fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

fn path_ids(state: &LearnerState, e: &str) -> Vec<String> {
    state.s.trace_path(&bs(e)).unwrap().into_iter().map(|(ix, _)| state.s.id(ix).display_id()).collect()
}

fn target() -> Omtbdd {
    Omtbdd::from_document(RUNNING_TARGET).unwrap()
}

fn initial(mq: &mut TargetMembership) -> LearnerState {
    LearnerState::initial(8, &bs("10100100"), 1, &bs("01111100"), 0, mq).unwrap()
}

#[test]
fn quoted_values_hold_on_the_target() {
    let d = target();
    for (x, v) in [
        ("01000101", 2),
        ("10100101", 1),
        ("11000101", 1),
        ("01101010", 1),
        ("10101010", 0),
        ("01111010", 1),
        ("10100100", 1),
        ("01111100", 0),
    ] {
        assert_eq!(d.eval(&bs(x)).unwrap(), v, "D({x})");
    }
}

#[test]
fn initial_hypothesis() {
    let d = target();
    let mut mq = TargetMembership::new(&d);
    let state = initial(&mut mq);
    assert!(state.s.has_dummy_root());
    assert_eq!(state.s.node_count(), 3);
    assert_eq!(state.s.eval(&bs("01111100")).unwrap(), 0);
    assert_eq!(path_ids(&state, "01000101"), ["λ", "1010", "10100100"]);
    let sink = state.s.lookup(&bs("10101100")).unwrap();
    assert_eq!(state.s.node(sink).value(), Some(0));
    assert_eq!(state.trees[4].last_twin_test_label(&bs("1010")).unwrap(), &bs("0100"));
    assert!(state.check(&d, 12).ok());

    // no edge of T_8's root carries the value 2
    match state.trees[8].classify(&bs("01000101"), &mut mq) {
        Classification::Stuck { test, value, .. } => {
            assert!(test.is_empty());
            assert_eq!(value, 2);
        }
        other => panic!("{other:?}"),
    }
    for j in 1..8 {
        assert_eq!(state.trees[j].classify(&bs("01000101").pre(j).unwrap(), &mut mq), Classification::Mu);
    }
}

#[test]
fn updates_follow_the_trace() {
    let d = target();
    let mut mq = TargetMembership::new(&d);
    let mut state = initial(&mut mq);

    let first = state.update(&bs("01000101"), 2, &mut mq, false).unwrap();
    assert_eq!(first.kind, UpdateKind::NewBranchingNode);
    assert_eq!((first.i, first.j), (1, Some(4)));
    assert!(first.dummy_promoted);
    assert!(!state.s.has_dummy_root());
    let sink = state.s.lookup(&bs("01000101")).unwrap();
    assert_eq!(state.s.node(sink).value(), Some(2));
    assert!(state.trees[8].contains_leaf(&bs("01000101")));
    let root = state.s.node(0);
    assert_eq!(root.out(0).unwrap().label, bs("01000101"));

    let second = state.update(&bs("01100000"), 1, &mut mq, false).unwrap();
    assert_eq!(second.kind, UpdateKind::NewBranchingNode);
    assert_eq!(second.new_node, bs("01"));
    assert_eq!(state.s.eval(&bs("01100000")).unwrap(), 1);

    // box 3
    assert_eq!(path_ids(&state, "01111010"), ["λ", "01", "1010", "10101100"]);
    let split = state.update(&bs("01111010"), 1, &mut mq, false).unwrap();
    assert_eq!(split.kind, UpdateKind::NodeSplit);
    assert_eq!(split.i, 2);
    assert_eq!(split.new_node, bs("0110"));
    let t4 = &state.trees[4];
    let single = t4
        .nodes()
        .iter()
        .find_map(|n| match n {
            TreeNode::Single { test, branches } if *test == bs("1010") => Some(branches),
            _ => None,
        })
        .expect("single-test node labeled 1010 in T_4");
    assert_eq!(t4.node(single[&1]), &TreeNode::Leaf(bs("0110")));
    assert_eq!(t4.node(single[&0]), &TreeNode::Leaf(bs("1010")));

    // box 4: still a counterexample
    assert_eq!(state.s.eval(&bs("01111010")).unwrap(), 0);
    let fourth = state.update(&bs("01111010"), 1, &mut mq, false).unwrap();
    assert_eq!(fourth.kind, UpdateKind::NewBranchingNode);
    assert_eq!(state.s.eval(&bs("01111010")).unwrap(), 1);

    // box 5 to 6
    let fifth = state.update(&bs("10100010"), 2, &mut mq, false).unwrap();
    assert_eq!(fifth.kind, UpdateKind::NewBranchingNode);
    assert_eq!(fifth.new_node, bs("101001"));
    let v = state.s.lookup(&bs("101001")).unwrap();
    let from = state.s.lookup(&bs("1010")).unwrap();
    assert!(state.s.node(from).edges().any(|(_, e)| e.to == v));
    assert!(!state.s.node(from).edges().any(|(_, e)| state.s.id(e.to) == &bs("10100100")));

    assert!(state.check(&d, 12).ok());
    let h = state.s.extract(3).unwrap().reduce();
    assert!(h.equivalent(&d).unwrap().is_yes());
    assert_eq!(h.node_count(), 9);
    assert!(mq.queries() > 0);
}

#[test]
fn classification_invariant_on_equivalent_access_strings() {
    // access strings reaching the same target node classify identically
    let d = target().reduce();
    let mut mq = TargetMembership::new(&d);
    let mut state = initial(&mut mq);
    for (e, l) in [("01000101", 2), ("01100000", 1), ("01111010", 1), ("01111010", 1), ("10100010", 2)] {
        state.update(&bs(e), l, &mut mq, false).unwrap();
    }
    for level in 1..=8 {
        let mut by_node: std::collections::HashMap<usize, Classification> = Default::default();
        for x in 0..1u64 << level {
            let a = BitString::from_index(x, level);
            let Some(node) = d.trace_to_node(&a) else { continue };
            let got = state.trees[level].classify(&a, &mut mq);
            if let Some(prev) = by_node.insert(node, got.clone()) {
                assert_eq!(prev, got, "level {level}, {a:?}");
            }
        }
    }
}
