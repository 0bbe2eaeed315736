//! Random reduced diagrams with a prescribed node count.
//!
//! Each round lays out `n' - K` internal nodes over sorted random
//! variables followed by `K` sinks, wires every surviving node towards the
//! next variable band (preferring nodes nobody points to yet), drops nodes
//! that received no edge, labels the sinks with a random permutation of
//! `0..K` and reduces. `n'` is nudged by the shortfall until the reduced
//! diagram has exactly `n` nodes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Node, Omtbdd, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    /// Node count of the output, sinks included.
    pub n: usize,
    pub m: usize,
    pub k: Value,
    pub seed: u64,
    pub retry_cap: usize,
}

impl GenParams {
    pub fn new(n: usize, m: usize, k: Value, seed: u64) -> Self {
        GenParams { n, m, k, seed, retry_cap: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("no diagram with {n} nodes after {rounds} rounds (last attempt had {last})")]
    RetryCap { n: usize, rounds: usize, last: usize },
}

/// Upper bound on the node count of any reduced diagram with `m` variables
/// and `k` sinks.
pub fn max_nodes(m: usize, k: Value) -> usize {
    let mut below = k as u128;
    for var in (1..=m).rev() {
        let width = if var > 100 { u128::MAX } else { 1u128 << (var - 1) };
        let here = width.min(below.saturating_mul(below.saturating_sub(1)));
        below = below.saturating_add(here);
        if below > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    below as usize
}

pub fn generate(p: &GenParams) -> Result<Omtbdd, GenError> {
    let k = p.k as usize;
    if p.m < 1 {
        return Err(GenError::Invalid("m must be at least 1".into()));
    }
    if k < 2 {
        return Err(GenError::Invalid("K must be at least 2".into()));
    }
    if p.n < k + 1 {
        return Err(GenError::Invalid(format!("n = {} is below K + 1 = {}", p.n, k + 1)));
    }
    if p.n > max_nodes(p.m, p.k) {
        return Err(GenError::Invalid(format!(
            "no reduced diagram over {} variables with {} sinks has {} nodes",
            p.m, k, p.n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (lo, hi) = (k + 1, 4 * p.n);
    let mut n_prime = p.n;
    let mut got = p.n;
    for _ in 0..p.retry_cap {
        n_prime = (n_prime + p.n).saturating_sub(got).clamp(lo, hi);
        let d = attempt(&mut rng, n_prime, p.m, k);
        got = d.node_count();
        if got == p.n {
            return Ok(d);
        }
    }
    Err(GenError::RetryCap { n: p.n, rounds: p.retry_cap, last: got })
}

fn attempt(rng: &mut ChaCha8Rng, n_prime: usize, m: usize, k: usize) -> Omtbdd {
    let inner = n_prime - k;
    let mut vars: Vec<usize> = (0..inner).map(|_| rng.gen_range(1..=m)).collect();
    vars.sort_unstable();

    // next[j]: first index holding a larger variable (or the first sink);
    // every sink's band ends at n'
    let mut next = vec![n_prime; n_prime];
    let mut boundary = inner;
    for j in (0..inner).rev() {
        if j + 1 < inner && vars[j + 1] > vars[j] {
            boundary = j + 1;
        }
        next[j] = boundary;
    }

    let mut has_incoming = vec![false; n_prime];
    let mut alive = vec![true; n_prime];
    let mut children = vec![[0usize; 2]; inner];
    for j in 0..inner {
        if j > 0 && !has_incoming[j] {
            alive[j] = false;
            continue;
        }
        let start = next[j];
        let band_end = next[start];
        let first_bit = rng.gen_range(0..2usize);
        let mut first_target = None;
        for bit in [first_bit, 1 - first_bit] {
            let fresh: Vec<usize> = (start..band_end).filter(|&h| !has_incoming[h]).collect();
            let h = if let Some(&h) = fresh.choose(rng) {
                h
            } else {
                match first_target {
                    None => rng.gen_range(start..n_prime),
                    Some(taken) => {
                        let h = rng.gen_range(start..n_prime - 1);
                        if h >= taken {
                            h + 1
                        } else {
                            h
                        }
                    }
                }
            };
            children[j][bit] = h;
            has_incoming[h] = true;
            first_target = Some(h);
        }
    }

    let mut labels: Vec<Value> = (0..k as Value).collect();
    labels.shuffle(rng);
    let mut new_id = vec![usize::MAX; n_prime];
    let mut count = 0;
    for j in 0..n_prime {
        if alive[j] {
            new_id[j] = count;
            count += 1;
        }
    }
    let mut nodes = Vec::with_capacity(count);
    for j in 0..n_prime {
        if !alive[j] {
            continue;
        }
        nodes.push(if j < inner {
            let [lo, hi] = children[j];
            Node::Branch { var: vars[j], lo: new_id[lo], hi: new_id[hi] }
        } else {
            Node::Sink { value: labels[j - inner] }
        });
    }
    Omtbdd::new(m, k as Value, nodes, 0).expect("generated diagram respects the order").reduce()
}
