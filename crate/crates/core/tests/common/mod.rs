#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use omtbdd::diagram::{Node, Omtbdd, Value};
use omtbdd::generator::{generate, max_nodes, GenParams};

pub const RUNNING_TARGET: &str = include_str!("../../examples/data/running.dd");

/// Walks the node list directly, without the library's evaluator.
pub fn walk(d: &Omtbdd, x: u64) -> Value {
    let m = d.m();
    let mut at = d.root();
    loop {
        match d.nodes()[at] {
            Node::Sink { value } => return value,
            Node::Branch { var, lo, hi } => at = if (x >> (m - var)) & 1 == 1 { hi } else { lo },
        }
    }
}

/// Values on all `2^m` inputs, input read big-endian.
pub fn table(d: &Omtbdd) -> Vec<Value> {
    (0..1u64 << d.m()).map(|x| walk(d, x)).collect()
}

/// Node count of the reduced diagram of `t`: one node per distinct
/// subfunction that depends on its first variable, plus one per value.
pub fn canonical_size(t: &[Value], m: usize) -> usize {
    let mut count = t.iter().collect::<BTreeSet<_>>().len();
    for level in 0..m {
        let width = 1usize << (m - level);
        let mut seen = HashSet::new();
        for chunk in t.chunks(width) {
            let (lo, hi) = chunk.split_at(width / 2);
            if lo != hi && seen.insert(chunk) {
                count += 1;
            }
        }
    }
    count
}

/// A random ordered decision tree with repeated subtrees left in place, so
/// that reduction has work to do.
pub fn random_unreduced(rng: &mut impl Rng, m: usize, k: Value) -> Omtbdd {
    fn build(rng: &mut impl Rng, nodes: &mut Vec<Node>, var: usize, m: usize, k: Value) -> usize {
        if var > m || rng.gen_bool(0.15) {
            nodes.push(Node::Sink { value: rng.gen_range(0..k) });
            return nodes.len() - 1;
        }
        let lo_var = rng.gen_range(var + 1..=m + 1);
        let lo = build(rng, nodes, lo_var, m, k);
        let hi = if rng.gen_bool(0.2) {
            lo
        } else {
            let hi_var = rng.gen_range(var + 1..=m + 1);
            build(rng, nodes, hi_var, m, k)
        };
        nodes.push(Node::Branch { var, lo, hi });
        nodes.len() - 1
    }
    let mut nodes = Vec::new();
    let top = rng.gen_range(1..=m);
    let root = build(rng, &mut nodes, top, m, k);
    Omtbdd::new(m, k, nodes, root).expect("ordered by construction")
}

/// Parameters `(n, m, k)` for a generated target. `n` is kept between
/// `2K - 1` and half the largest possible node count so the generator
/// reliably hits it.
pub fn draw_params(
    rng: &mut ChaCha8Rng,
    m_range: (usize, usize),
    k_range: (Value, Value),
    n_max: usize,
) -> (usize, usize, Value) {
    loop {
        let m = rng.gen_range(m_range.0..=m_range.1);
        let k = rng.gen_range(k_range.0..=k_range.1);
        let lo = 4.max(2 * k as usize - 1);
        let hi = n_max.min(max_nodes(m, k) / 2);
        if lo <= hi {
            return (rng.gen_range(lo..=hi), m, k);
        }
    }
}

pub fn random_target(
    seed: u64,
    m_range: (usize, usize),
    k_range: (Value, Value),
    n_max: usize,
) -> (GenParams, Omtbdd) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m, k) = draw_params(&mut rng, m_range, k_range, n_max);
    let p = GenParams::new(n, m, k, seed);
    let d = generate(&p).unwrap_or_else(|e| panic!("{p:?}: {e}"));
    (p, d)
}
