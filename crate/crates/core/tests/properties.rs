//! Randomized invariants checked against brute-force references.

mod common;

use std::cell::RefCell;
use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use omtbdd::bits::BitString;
use omtbdd::ctree::Classification;
use omtbdd::diagram::{EqResult, Node, Omtbdd};
use omtbdd::generator::{generate, max_nodes, GenParams};
use omtbdd::learner::{ceil_log2, find_flip, learn, LearnerConfig, LearnerState};
use omtbdd::oracles::{
    oracles_from_target, CachedMembership, DatasetEquivalence, EquivalenceOracle, MembershipOracle,
};
use omtbdd::pipeline::{
    binarize, extract_conditions, order_from_counts, order_variables, ClassifierOracle, Condition, Tree,
    TreeClassifier, TreeNode,
};

use common::{canonical_size, random_target, random_unreduced, table, walk};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn index(a: &BitString) -> usize {
    a.bits().iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// Learns `target` and returns the final state, if it is not constant.
fn learned_state(target: &Omtbdd) -> Option<LearnerState> {
    let (mut mq, mut eq) = oracles_from_target(target);
    learn(target.m(), &mut mq, &mut eq, &LearnerConfig::default()).unwrap().state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduce_is_canonical(seed in any::<u64>(), m in 1usize..=9, k in 2u32..=4) {
        let mut r = rng(seed);
        let a = random_unreduced(&mut r, m, k);
        let b = random_unreduced(&mut r, m, k);
        let (ra, rb) = (a.reduce(), b.reduce());
        prop_assert!(ra.same_structure(&ra.reduce()));
        prop_assert!(ra.is_reduced());
        prop_assert_eq!(table(&ra), table(&a));
        prop_assert_eq!(ra.node_count(), canonical_size(&table(&a), m));
        prop_assert_eq!(ra.same_structure(&rb), table(&a) == table(&b));
    }

    #[test]
    fn reduce_ignores_node_numbering(seed in any::<u64>(), m in 1usize..=8) {
        let mut r = rng(seed);
        let a = random_unreduced(&mut r, m, 3);
        // reverse the node list
        let n = a.nodes().len();
        let flip = |id: usize| n - 1 - id;
        let nodes: Vec<Node> = a.nodes().iter().rev().map(|node| match *node {
            Node::Branch { var, lo, hi } => Node::Branch { var, lo: flip(lo), hi: flip(hi) },
            sink => sink,
        }).collect();
        let b = Omtbdd::new(m, 3, nodes, flip(a.root())).unwrap();
        prop_assert!(a.reduce().same_structure(&b.reduce()));
    }

    #[test]
    fn equivalence_matches_truth_tables(seed in any::<u64>(), m in 1usize..=9) {
        let mut r = rng(seed);
        let a = random_unreduced(&mut r, m, 3);
        let b = if r.gen_bool(0.3) { a.reduce() } else { random_unreduced(&mut r, m, 3) };
        let (ta, tb) = (table(&a), table(&b));
        match a.equivalent(&b).unwrap() {
            EqResult::Yes => prop_assert_eq!(&ta, &tb),
            EqResult::No(e) => {
                prop_assert_eq!(e.len(), m);
                prop_assert_ne!(ta[index(&e)], tb[index(&e)]);
            }
        }
        prop_assert_eq!(a.equivalent(&b).unwrap().is_yes(), a.reduce().same_structure(&b.reduce()));
    }

    #[test]
    fn eval_matches_direct_walk(seed in any::<u64>(), m in 1usize..=10) {
        let mut r = rng(seed);
        let d = random_unreduced(&mut r, m, 4);
        for x in 0..1u64 << m {
            let a = BitString::from_index(x, m);
            prop_assert_eq!(d.eval(&a).unwrap(), walk(&d, x));
        }
    }

    #[test]
    fn access_strings_stop_exactly_at_a_node(seed in any::<u64>(), m in 1usize..=8) {
        let d = random_unreduced(&mut rng(seed), m, 3).reduce();
        for len in 0..=m {
            for x in 0..1u64 << len {
                let a = BitString::from_index(x, len);
                let mut at = d.root();
                while let Node::Branch { var, lo, hi } = d.nodes()[at] {
                    if var > len {
                        break;
                    }
                    at = if a.bit(var - 1) == 1 { hi } else { lo };
                }
                let lands = match d.nodes()[at] {
                    Node::Branch { var, .. } => var == len + 1,
                    Node::Sink { .. } => len == m,
                };
                prop_assert_eq!(d.trace_to_node(&a), lands.then_some(at));
            }
        }
    }

    #[test]
    fn find_flip_agrees_with_linear_scan(
        g in proptest::collection::vec(any::<bool>(), 2..200),
        lo_frac in 0.0f64..1.0,
    ) {
        let n = g.len();
        let lo = ((n - 2) as f64 * lo_frac) as usize;
        let Some(hi) = (lo + 1..n).rev().find(|&h| g[h] != g[lo]) else { return Ok(()) };
        let probes = RefCell::new(Vec::new());
        let (i, j) = find_flip(lo, hi, g[lo], |x| { probes.borrow_mut().push(x); g[x] });
        prop_assert_eq!(j, i + 1);
        prop_assert!(lo <= i && j <= hi);
        prop_assert_ne!(g[i], g[j]);
        let probes = probes.into_inner();
        prop_assert!(probes.len() as u32 <= ceil_log2((hi - lo) as u64));
        prop_assert!(!probes.contains(&lo) && !probes.contains(&hi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_hits_the_node_count(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=40);
        let k = r.gen_range(2..=12);
        let hi = 500.min(max_nodes(m, k) / 2);
        prop_assume!(2 * k as usize - 1 <= hi);
        let n = r.gen_range(2 * k as usize - 1..=hi);
        let d = generate(&GenParams::new(n, m, k, seed)).unwrap();
        prop_assert_eq!(d.node_count(), n);
        prop_assert!(d.same_structure(&d.reduce()));
        let values: Vec<u32> = d.nodes().iter().filter_map(|x| match x {
            Node::Sink { value } => Some(*value),
            _ => None,
        }).collect();
        let mut distinct = values.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(distinct.len(), values.len());
        prop_assert!(values.iter().all(|&v| v < k));
        prop_assert_eq!(generate(&GenParams::new(n, m, k, seed)).unwrap(), d);
    }

    #[test]
    fn hypothesis_eval_equals_extracted_diagram(seed in any::<u64>()) {
        let (_, target) = random_target(seed, (2, 10), (2, 5), 40);
        let Some(state) = learned_state(&target) else { return Ok(()) };
        let h = state.s.extract(target.k()).unwrap();
        for x in 0..1u64 << target.m() {
            let a = BitString::from_index(x, target.m());
            prop_assert_eq!(state.s.eval(&a).unwrap(), h.eval(&a).unwrap());
        }
    }

    #[test]
    fn equivalent_access_strings_classify_alike(seed in any::<u64>()) {
        let (_, target) = random_target(seed, (2, 9), (2, 4), 30);
        let Some(state) = learned_state(&target) else { return Ok(()) };
        let (mut mq, _) = oracles_from_target(&target);
        for level in 1..=target.m() {
            let mut seen: HashMap<usize, Classification> = HashMap::new();
            for x in 0..1u64 << level {
                let a = BitString::from_index(x, level);
                let Some(node) = target.trace_to_node(&a) else { continue };
                let got = state.trees[level].classify(&a, &mut mq);
                if let Some(prev) = seen.insert(node, got.clone()) {
                    prop_assert_eq!(prev, got);
                }
            }
        }
    }

    #[test]
    fn cache_does_not_change_the_result(seed in any::<u64>()) {
        let (_, target) = random_target(seed, (2, 24), (2, 6), 60);
        let config = LearnerConfig { record_events: true, ..LearnerConfig::default() };
        let (mut mq, mut eq) = oracles_from_target(&target);
        let plain = learn(target.m(), &mut mq, &mut eq, &config).unwrap();
        let (mq, mut eq) = oracles_from_target(&target);
        let mut cached = CachedMembership::new(mq);
        let memo = learn(target.m(), &mut cached, &mut eq, &config).unwrap();
        prop_assert_eq!(&plain.diagram, &memo.diagram);
        prop_assert_eq!(&plain.updates, &memo.updates);
        prop_assert_eq!(&plain.events, &memo.events);
        prop_assert_eq!((plain.mq, plain.eq), (memo.mq, memo.eq));
        prop_assert_eq!(cached.inner().queries(), cached.distinct());
        prop_assert!(cached.distinct() <= memo.mq);
    }

    #[test]
    fn dataset_oracle_is_stable(seed in any::<u64>()) {
        let (_, target) = random_target(seed, (4, 16), (2, 5), 40);
        let mut r = rng(seed ^ 1);
        let m = target.m();
        let samples: Vec<(BitString, u32)> = (0..50)
            .map(|_| {
                let a = BitString::from_index(r.gen_range(0..1u64 << m), m);
                let v = target.eval(&a).unwrap();
                (a, v)
            })
            .collect();
        let mut eq = DatasetEquivalence::new(m, samples.clone()).unwrap();
        let zero = Omtbdd::constant(m, target.k(), 0);
        let first = eq.check(&zero);
        prop_assert_eq!(&first, &eq.check(&zero));
        let expected = samples.iter().find(|(_, v)| *v != 0).map(|(a, _)| a.clone());
        prop_assert_eq!(first.counterexample().cloned(), expected);
        prop_assert!(eq.check(&target).is_yes());
    }
}

fn random_forest(seed: u64) -> TreeClassifier {
    fn grow(r: &mut ChaCha8Rng, nodes: &mut Vec<TreeNode>, depth: usize) -> usize {
        let ix = nodes.len();
        if depth == 0 || r.gen_bool(0.2) {
            nodes.push(TreeNode::Leaf { class: r.gen_range(0..3) });
            return ix;
        }
        nodes.push(TreeNode::Leaf { class: 0 });
        let feature = r.gen_range(0..5);
        let threshold = r.gen_range(-4..=4) as f64 / 4.0;
        let yes = grow(r, nodes, depth - 1);
        let no = grow(r, nodes, depth - 1);
        nodes[ix] = TreeNode::Split { feature, threshold, yes, no };
        ix
    }
    let mut r = rng(seed);
    let trees = (0..r.gen_range(1..=5))
        .map(|_| {
            let mut nodes = Vec::new();
            let root = grow(&mut r, &mut nodes, 5);
            Tree { nodes, root }
        })
        .collect();
    TreeClassifier::new(3, 5, trees).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn binarize_is_monotone(
        x in proptest::collection::vec(-2.0f64..2.0, 5),
        bump in 0.0f64..2.0,
        feature in 0usize..5,
        seed in any::<u64>(),
    ) {
        let conds = extract_conditions(&random_forest(seed));
        let before = binarize(&x, &conds).unwrap();
        let mut y = x.clone();
        y[feature] += bump;
        let after = binarize(&y, &conds).unwrap();
        for j in 0..conds.len() {
            prop_assert!(after.bit(j) <= before.bit(j));
        }
    }

    #[test]
    fn ordering_is_a_permutation(seed in any::<u64>()) {
        let c = random_forest(seed);
        let conds = extract_conditions(&c);
        let ordered = order_variables(&c, &conds);
        prop_assert_eq!(ordered.len(), conds.len());
        for cond in &conds {
            prop_assert_eq!(ordered.iter().filter(|o| *o == cond).count(), 1);
        }
        let mut r = rng(seed);
        let n = r.gen_range(0..12);
        let counts: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| r.gen_range(0..4)).collect()).collect();
        let mut order = order_from_counts(&counts);
        order.sort_unstable();
        prop_assert_eq!(order, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn extracted_conditions_are_distinct(seed in any::<u64>()) {
        let c = random_forest(seed);
        let conds: Vec<Condition> = extract_conditions(&c);
        for (i, a) in conds.iter().enumerate() {
            for b in &conds[i + 1..] {
                prop_assert!(a.feature != b.feature || a.threshold.to_bits() != b.threshold.to_bits());
            }
        }
        let splits = c.trees.iter().flat_map(|t| t.nodes.iter()).filter(|n| matches!(n, TreeNode::Split { .. })).count();
        prop_assert!(conds.len() <= splits);
    }
}

#[test]
fn classifier_oracle_matches_real_valued_prediction() {
    let mut r = rng(77);
    for seed in 0..20 {
        let c = random_forest(seed);
        let conds = order_variables(&c, &extract_conditions(&c));
        let mq = ClassifierOracle::new(&c, &conds).unwrap();
        for _ in 0..500 {
            let x: Vec<f64> =
                (0..5)
                    .map(|_| {
                        if r.gen_bool(0.2) {
                            r.gen_range(-4..=4) as f64 / 4.0
                        } else {
                            r.gen_range(-1.5..1.5)
                        }
                    })
                    .collect();
            let bits = binarize(&x, &conds).unwrap();
            assert_eq!(mq.answer(bits.bits()), c.predict(&x).unwrap());
        }
    }
}
