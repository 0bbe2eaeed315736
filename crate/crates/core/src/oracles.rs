//! Membership and equivalence oracles with query counters.

use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::diagram::{EqResult, Omtbdd, Value};

/// Answers `f(a)` for full-length assignments. Must be deterministic over
/// a run.
pub trait MembershipOracle {
    fn query(&mut self, a: &BitString) -> Value;
    /// Calls made so far.
    fn queries(&self) -> u64;
}

/// Compares a hypothesis with the hidden function.
pub trait EquivalenceOracle {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult;
    fn queries(&self) -> u64;
}

impl<T: MembershipOracle + ?Sized> MembershipOracle for &mut T {
    fn query(&mut self, a: &BitString) -> Value {
        (**self).query(a)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<T: EquivalenceOracle + ?Sized> EquivalenceOracle for &mut T {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        (**self).check(hypothesis)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<T: MembershipOracle + ?Sized> MembershipOracle for Box<T> {
    fn query(&mut self, a: &BitString) -> Value {
        (**self).query(a)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<T: EquivalenceOracle + ?Sized> EquivalenceOracle for Box<T> {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        (**self).check(hypothesis)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("input {input} is labeled both {first} and {second}")]
    ConflictingSample { input: BitString, first: Value, second: Value },
    #[error("sample {input} has length {got}, expected {expected}")]
    SampleLength { input: BitString, expected: usize, got: usize },
}

/// Membership oracle evaluating a known diagram.
#[derive(Debug, Clone)]
pub struct TargetMembership {
    target: Omtbdd,
    count: u64,
}

impl TargetMembership {
    pub fn new(target: &Omtbdd) -> Self {
        TargetMembership { target: target.reduce(), count: 0 }
    }
}

impl MembershipOracle for TargetMembership {
    fn query(&mut self, a: &BitString) -> Value {
        self.count += 1;
        self.target.eval_bits(a.bits())
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

/// Exact equivalence oracle backed by [`Omtbdd::equivalent`].
#[derive(Debug, Clone)]
pub struct TargetEquivalence {
    target: Omtbdd,
    count: u64,
}

impl TargetEquivalence {
    pub fn new(target: &Omtbdd) -> Self {
        TargetEquivalence { target: target.reduce(), count: 0 }
    }
}

impl EquivalenceOracle for TargetEquivalence {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        self.count += 1;
        hypothesis.equivalent(&self.target).expect("hypothesis and target range over the same variables")
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

pub fn oracles_from_target(target: &Omtbdd) -> (TargetMembership, TargetEquivalence) {
    (TargetMembership::new(target), TargetEquivalence::new(target))
}

/// Declares YES once the hypothesis agrees with every stored sample;
/// otherwise returns the first disagreeing sample in stored order.
#[derive(Debug, Clone)]
pub struct DatasetEquivalence {
    samples: Vec<(BitString, Value)>,
    count: u64,
}

impl DatasetEquivalence {
    /// Exact duplicates are kept; the same input with two labels is rejected.
    pub fn new(m: usize, samples: Vec<(BitString, Value)>) -> Result<Self, OracleError> {
        let mut seen: HashMap<&BitString, Value> = HashMap::new();
        for (input, value) in &samples {
            if input.len() != m {
                return Err(OracleError::SampleLength {
                    input: input.clone(),
                    expected: m,
                    got: input.len(),
                });
            }
            if let Some(&first) = seen.get(input) {
                if first != *value {
                    return Err(OracleError::ConflictingSample {
                        input: input.clone(),
                        first,
                        second: *value,
                    });
                }
            }
            seen.insert(input, *value);
        }
        Ok(DatasetEquivalence { samples, count: 0 })
    }

    pub fn samples(&self) -> &[(BitString, Value)] {
        &self.samples
    }
}

impl EquivalenceOracle for DatasetEquivalence {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        self.count += 1;
        self.samples
            .iter()
            .find(|(a, v)| hypothesis.eval_bits(a.bits()) != *v)
            .map_or(EqResult::Yes, |(a, _)| EqResult::No(a.clone()))
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

/// Random testing: answers YES after `trials` uniform inputs agree.
#[derive(Debug, Clone)]
pub struct SamplingEquivalence<M> {
    mq: M,
    m: usize,
    trials: u64,
    rng: ChaCha8Rng,
    count: u64,
}

impl<M: MembershipOracle> SamplingEquivalence<M> {
    pub fn new(mq: M, m: usize, trials: u64, seed: u64) -> Self {
        assert!(trials >= 1, "sampling needs at least one trial");
        SamplingEquivalence { mq, m, trials, rng: ChaCha8Rng::seed_from_u64(seed), count: 0 }
    }

    /// The wrapped oracle, whose counter includes the sampling queries.
    pub fn membership(&self) -> &M {
        &self.mq
    }
}

impl<M: MembershipOracle> EquivalenceOracle for SamplingEquivalence<M> {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        self.count += 1;
        for _ in 0..self.trials {
            let bits: Vec<u8> = (0..self.m).map(|_| self.rng.gen_range(0..2)).collect();
            let a = BitString::from_bits(bits);
            if hypothesis.eval_bits(a.bits()) != self.mq.query(&a) {
                return EqResult::No(a);
            }
        }
        EqResult::Yes
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

/// Memoizing wrapper. [`MembershipOracle::queries`] counts every call;
/// [`CachedMembership::distinct`] counts the calls forwarded to the inner
/// oracle.
#[derive(Debug, Clone)]
pub struct CachedMembership<M> {
    inner: M,
    cache: HashMap<BitString, Value>,
    raw: u64,
}

impl<M: MembershipOracle> CachedMembership<M> {
    pub fn new(inner: M) -> Self {
        CachedMembership { inner, cache: HashMap::new(), raw: 0 }
    }

    pub fn distinct(&self) -> u64 {
        self.cache.len() as u64
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: MembershipOracle> MembershipOracle for CachedMembership<M> {
    fn query(&mut self, a: &BitString) -> Value {
        self.raw += 1;
        if let Some(&v) = self.cache.get(a) {
            return v;
        }
        let v = self.inner.query(a);
        self.cache.insert(a.clone(), v);
        v
    }
    fn queries(&self) -> u64 {
        self.raw
    }
}

/// Membership oracle from a closure.
pub struct FnOracle<F> {
    f: F,
    count: u64,
}

impl<F: FnMut(&BitString) -> Value> FnOracle<F> {
    pub fn new(f: F) -> Self {
        FnOracle { f, count: 0 }
    }
}

impl<F: FnMut(&BitString) -> Value> MembershipOracle for FnOracle<F> {
    fn query(&mut self, a: &BitString) -> Value {
        self.count += 1;
        (self.f)(a)
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

/// Hands out a fixed list of counterexamples, then answers exactly.
///
/// A scripted string is skipped when it is not a genuine counterexample
/// for the hypothesis it is offered against.
#[derive(Debug, Clone)]
pub struct ScriptedEquivalence {
    exact: TargetEquivalence,
    target: Omtbdd,
    script: VecDeque<BitString>,
    skipped: Vec<BitString>,
}

impl ScriptedEquivalence {
    pub fn new(target: &Omtbdd, script: impl IntoIterator<Item = BitString>) -> Self {
        ScriptedEquivalence {
            exact: TargetEquivalence::new(target),
            target: target.reduce(),
            script: script.into_iter().collect(),
            skipped: Vec::new(),
        }
    }

    /// Scripted strings that were not counterexamples when offered.
    pub fn skipped(&self) -> &[BitString] {
        &self.skipped
    }
}

impl EquivalenceOracle for ScriptedEquivalence {
    fn check(&mut self, hypothesis: &Omtbdd) -> EqResult {
        if let Some(e) = self.script.pop_front() {
            if hypothesis.eval_bits(e.bits()) != self.target.eval_bits(e.bits()) {
                self.exact.count += 1;
                return EqResult::No(e);
            }
            self.skipped.push(e);
        }
        self.exact.check(hypothesis)
    }
    fn queries(&self) -> u64 {
        self.exact.queries()
    }
}
