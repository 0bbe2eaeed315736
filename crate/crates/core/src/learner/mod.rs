//! Exact learning of a reduced OMTBDD from membership and equivalence
//! queries.
//!
//! [`learn`] drives the outer loop. [`LearnerState`] holds the hypothesis
//! and the classification trees and exposes the individual steps so they
//! can be exercised directly.

mod check;
mod events;
mod search;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::bits::{BitString, BitsError};
use crate::ctree::{Classification, ClassificationTree, TreeError};
use crate::diagram::{DiagramError, EqResult, Omtbdd, Value};
use crate::hypothesis::{HypError, NodeIx, Omtbddas};
use crate::oracles::{EquivalenceOracle, MembershipOracle};

pub use check::{check_conditions, Condition, ConditionReport, Violation};
pub use events::{read_events, write_events, Event, UpdateKind};
pub use search::{ceil_log2, find_flip};

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    /// Recurse with the unconsumed suffix of the test string instead of the
    /// whole string when a new node is created while adding edges.
    pub addedge_suffix: bool,
    /// Run the condition checker against this target after the initial
    /// hypothesis and after every update; fail on the first violation.
    pub check_against: Option<Omtbdd>,
    /// Largest `m` for which the checker enumerates every string.
    pub exhaustive_limit: usize,
    pub record_events: bool,
    /// Lower bound on the value-space size of the output.
    pub k_hint: Option<Value>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            addedge_suffix: false,
            check_against: None,
            exhaustive_limit: 12,
            record_events: false,
            k_hint: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("counterexample {input:?} has length {got}, expected {expected}", got = .input.len())]
    CounterexampleLength { input: BitString, expected: usize },
    #[error("{input:?} is not a counterexample: hypothesis and target both give {value}")]
    NotACounterexample { input: BitString, value: Value },
    #[error("adding an edge from {from:?} along {label:?} ran past level m")]
    LevelOverflow { from: BitString, label: BitString },
    #[error("every prefix of {label:?} below {from:?} classified as μ")]
    MuStreak { from: BitString, label: BitString },
    #[error("classification returned {0:?}, which is not a hypothesis node")]
    UnknownLeaf(BitString),
    #[error("the branching point coincides with the non-dummy node {0:?}")]
    NonDummyCrossover(BitString),
    #[error("a node split was requested at sink {0:?}")]
    SplitAtSink(BitString),
    #[error("an update left the hypothesis at {0} nodes")]
    NoProgress(usize),
    #[error("conditions violated after {updates} updates:\n{report}")]
    ConditionsViolated { updates: usize, report: ConditionReport },
    #[error(transparent)]
    Hypothesis(#[from] HypError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// Summary of one hypothesis update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateRecord {
    pub kind: UpdateKind,
    /// 1-based position on the counterexample's path.
    pub i: usize,
    pub j: Option<usize>,
    /// The node the update was built around.
    pub new_node: BitString,
    pub dummy_promoted: bool,
    pub nodes_before: usize,
    pub nodes_after: usize,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    /// Reduced form of the final hypothesis.
    pub diagram: Omtbdd,
    pub mq: u64,
    pub eq: u64,
    pub updates: Vec<UpdateRecord>,
    pub events: Vec<Event>,
    /// `None` when a constant hypothesis was accepted.
    pub state: Option<LearnerState>,
}

/// Worst-case query counts `(membership, equivalence)` for a target with
/// `n` nodes over `m` variables.
pub fn query_bounds(n: usize, m: usize) -> (u64, u64) {
    let n = n as u64;
    (2 * n * (ceil_log2(m as u64) as u64 + 3 * n), n)
}

/// Hypothesis plus one classification tree per level (`trees[j]` sorts
/// strings of length `j`; `trees[0]` is unused).
#[derive(Debug, Clone)]
pub struct LearnerState {
    pub s: Omtbddas,
    pub trees: Vec<ClassificationTree>,
}

fn pre(a: &BitString, i: usize) -> BitString {
    a.pre(i).expect("prefix length within string")
}

fn suf(a: &BitString, i: usize) -> BitString {
    a.suf(i).expect("suffix length within string")
}

impl LearnerState {
    /// Builds the first hypothesis from two inputs with different values,
    /// `D(e1) = l1` and `D(e) = l`.
    pub fn initial(
        m: usize,
        e1: &BitString,
        l1: Value,
        e: &BitString,
        l: Value,
        mq: &mut dyn MembershipOracle,
    ) -> Result<Self, LearnError> {
        if l1 == l {
            return Err(LearnError::NotACounterexample { input: e.clone(), value: l });
        }
        let mut probed: HashMap<usize, Value> = HashMap::new();
        let (_, i) = find_flip(0, m, true, |x| {
            let value = mq.query(&BitString::cro(e1, e, x).expect("equal lengths"));
            probed.insert(x, value);
            value == l1
        });
        let l2 = if i == m { l } else { probed[&i] };

        let v = pre(e1, m - i);
        let r = BitString::join(&[&[e1.bit(m - i)], suf(e, i - 1).bits()]);
        let r_dot = r.flip_first()?;

        let mut s = Omtbddas::new(m, !v.is_empty());
        let top = if v.is_empty() {
            Omtbddas::ROOT
        } else {
            let ix = s.add_node(v.clone())?;
            s.add_edge(Omtbddas::ROOT, ix, v.clone())?;
            ix
        };
        let s1 = s.add_sink(v.concat(&r), l1)?;
        let s2 = s.add_sink(v.concat(&r_dot), l2)?;
        s.add_edge(top, s1, r.clone())?;
        s.add_edge(top, s2, r_dot)?;

        let mut trees: Vec<ClassificationTree> = (0..m).map(ClassificationTree::new).collect();
        if !v.is_empty() {
            trees[m - i].graft_twin_test(r, (l1, l2), v)?;
        }
        trees.push(ClassificationTree::with_single_root(
            m,
            BitString::empty(),
            vec![(l1, s.id(s1).clone()), (l2, s.id(s2).clone())],
        )?);
        Ok(LearnerState { s, trees })
    }

    pub fn m(&self) -> usize {
        self.s.m()
    }

    /// Runs the condition checker against a known target.
    pub fn check(&self, target: &Omtbdd, exhaustive_limit: usize) -> ConditionReport {
        check_conditions(&self.s, &self.trees, target, exhaustive_limit)
    }

    /// Refines the hypothesis with a counterexample `e` whose true value is
    /// `l`.
    pub fn update(
        &mut self,
        e: &BitString,
        l: Value,
        mq: &mut dyn MembershipOracle,
        addedge_suffix: bool,
    ) -> Result<UpdateRecord, LearnError> {
        let m = self.m();
        let nodes_before = self.s.node_count();
        let path = self.s.trace_path(e)?;
        let k = path.len();
        let dk = self.s.node(path[k - 1].0).value().expect("paths end at sinks");
        if dk == l {
            return Err(LearnError::NotACounterexample { input: e.clone(), value: l });
        }

        // g(x) = [D(p_x · suf(e, m - |p_x|)) = D(p_k)]; false at the root,
        // true at the sink.
        let mut g_values: HashMap<usize, Value> = HashMap::new();
        g_values.insert(0, l);
        let (x, _) = find_flip(0, k - 1, false, |x| {
            let p = self.s.id(path[x].0);
            let value = mq.query(&p.concat(&suf(e, m - p.len())));
            g_values.insert(x, value);
            value == dk
        });
        let (pi, slot) = (path[x].0, path[x].1.expect("inner path node"));
        let next = path[x + 1].0;
        let q = self.s.node(pi).out(slot).expect("traced edge").label.clone();
        let e_next = suf(e, m - self.s.id(next).len());
        let value = mq.query(&self.s.id(pi).concat(&q).concat(&e_next));

        let (kind, j, new_node, dummy_promoted) = if value != dk {
            let v = self.node_split(pi, slot, next, &e_next, dk, value, mq, addedge_suffix)?;
            (UpdateKind::NodeSplit, None, v, false)
        } else {
            let (v, j, promoted) =
                self.new_branching_node(pi, slot, next, e, dk, g_values[&x], mq, addedge_suffix)?;
            (UpdateKind::NewBranchingNode, Some(j), v, promoted)
        };
        let nodes_after = self.s.node_count();
        if nodes_after <= nodes_before {
            return Err(LearnError::NoProgress(nodes_after));
        }
        Ok(UpdateRecord { kind, i: x + 1, j, new_node, dummy_promoted, nodes_before, nodes_after })
    }

    #[allow(clippy::too_many_arguments)]
    fn node_split(
        &mut self,
        pi: NodeIx,
        slot: u8,
        next: NodeIx,
        e_next: &BitString,
        dk: Value,
        dv: Value,
        mq: &mut dyn MembershipOracle,
        suffix: bool,
    ) -> Result<BitString, LearnError> {
        if self.s.node(next).is_sink() {
            return Err(LearnError::SplitAtSink(self.s.id(next).clone()));
        }
        let q = self.s.node(pi).out(slot).expect("traced edge").label.clone();
        let v_id = self.s.id(pi).concat(&q);
        let level = v_id.len();
        let v = self.s.add_node(v_id.clone())?;
        self.s.redirect(pi, slot, v, q)?;

        let mut local: BTreeMap<Value, NodeIx> = BTreeMap::new();
        local.insert(dk, next);
        local.insert(dv, v);
        let next_id = self.s.id(next).clone();
        let t = self.trees[level].last_twin_test_label(&next_id)?.clone();
        let t_dot = t.flip_first()?;
        self.add_edge_proc(v, &t, mq, suffix)?;
        self.add_edge_proc(v, &t_dot, mq, suffix)?;

        let snapshot: Vec<(NodeIx, u8)> = self.s.node(next).incoming().to_vec();
        for &(v1, bit) in &snapshot {
            let edge = self.s.node(v1).out(bit).cloned().expect("snapshot edge present");
            assert_eq!(edge.to, next, "incoming edge changed during the split");
            let base = self.s.id(v1).concat(&edge.label);
            let value = mq.query(&base.concat(e_next));
            match local.get(&value) {
                Some(&u) => {
                    if value != dk {
                        self.s.redirect(v1, bit, u, edge.label)?;
                    }
                }
                None => {
                    let w = self.s.add_node(base)?;
                    self.s.redirect(v1, bit, w, edge.label)?;
                    local.insert(value, w);
                    self.add_edge_proc(w, &t, mq, suffix)?;
                    self.add_edge_proc(w, &t_dot, mq, suffix)?;
                }
            }
        }
        assert!(
            self.s.node(next).incoming().iter().all(|x| snapshot.contains(x)),
            "new edges entered the split node"
        );

        let branches = local.iter().map(|(&val, &ix)| (val, self.s.id(ix).clone())).collect();
        self.trees[level].graft_single_test(&next_id, e_next.clone(), branches)?;
        Ok(v_id)
    }

    /// Returns the new node's id, the crossover index and whether the
    /// dummy root was promoted instead of inserting a node.
    #[allow(clippy::too_many_arguments)]
    fn new_branching_node(
        &mut self,
        pi: NodeIx,
        slot: u8,
        next: NodeIx,
        e: &BitString,
        dk: Value,
        d_pi_ei: Value,
        mq: &mut dyn MembershipOracle,
        suffix: bool,
    ) -> Result<(BitString, usize, bool), LearnError> {
        let m = self.m();
        let pi_id = self.s.id(pi).clone();
        let q = self.s.node(pi).out(slot).expect("traced edge").label.clone();
        let e_i = suf(e, m - pi_id.len());
        let e_next = suf(e, m - self.s.id(next).len());
        let f = pre(&e_i, q.len());

        // h(x) = [D(p_i · cro(q, f, x) · e_{i+1}) = D(p_k)]; h(0) holds and
        // h(|q|) fails, both known already.
        let mut h_values: HashMap<usize, Value> = HashMap::new();
        h_values.insert(q.len(), d_pi_ei);
        let (_, j) = find_flip(0, q.len(), true, |x| {
            let mid = BitString::cro(&q, &f, x).expect("equal lengths");
            let value = mq.query(&pi_id.concat(&mid).concat(&e_next));
            h_values.insert(x, value);
            value == dk
        });
        let head = pre(&q, q.len() - j);
        let v_id = pi_id.concat(&head);
        let r = suf(e, m - v_id.len());

        if j == q.len() {
            if pi != Omtbddas::ROOT || !self.s.has_dummy_root() {
                return Err(LearnError::NonDummyCrossover(pi_id));
            }
            self.s.promote_root();
            self.add_edge_proc(Omtbddas::ROOT, &r, mq, suffix)?;
            return Ok((v_id, j, true));
        }

        let level = v_id.len();
        let v = self.s.add_node(v_id.clone())?;
        self.s.redirect(pi, slot, v, head)?;
        self.s.add_edge(v, next, suf(&q, j))?;

        let d_vr = h_values[&j];
        let r_dot = r.flip_first()?;
        let crossing: Vec<_> = self
            .s
            .edges()
            .into_iter()
            .filter(|(from, _, edge)| self.s.id(*from).len() < level && self.s.id(edge.to).len() > level)
            .collect();
        for (v1, bit, edge) in crossing {
            let g = pre(&edge.label, level - self.s.id(v1).len());
            let base = self.s.id(v1).concat(&g);
            let a = mq.query(&base.concat(&r));
            let b = mq.query(&base.concat(&r_dot));
            if (a, b) == (d_vr, dk) {
                self.s.redirect(v1, bit, v, g)?;
            }
        }
        self.trees[level].graft_twin_test(r.clone(), (d_vr, dk), v_id.clone())?;
        self.add_edge_proc(v, &r, mq, suffix)?;
        Ok((v_id, j, false))
    }

    /// Adds the edge leaving `v` that starts along `t`, creating the nodes
    /// it discovers on the way. Depth-first, `t` before `ṫ` at every new
    /// node.
    pub fn add_edge_proc(
        &mut self,
        v: NodeIx,
        t: &BitString,
        mq: &mut dyn MembershipOracle,
        suffix: bool,
    ) -> Result<(), LearnError> {
        let m = self.m();
        let mut stack = vec![(v, t.clone())];
        while let Some((v, t)) = stack.pop() {
            let base = self.s.id(v).clone();
            let mut placed = false;
            for j in 1..=t.len() {
                let level = base.len() + j;
                if level > m {
                    return Err(LearnError::LevelOverflow { from: base, label: t });
                }
                let label = pre(&t, j);
                let a = base.concat(&label);
                match self.trees[level].classify(&a, mq) {
                    Classification::Mu => continue,
                    Classification::Leaf(u) => {
                        let ux = self.s.lookup(&u).ok_or(LearnError::UnknownLeaf(u))?;
                        self.s.add_edge(v, ux, label)?;
                    }
                    Classification::Stuck { node, test, value } => {
                        self.trees[level].add_value_edge(node, value, a.clone())?;
                        if level == m {
                            let sink_value = if test.is_empty() { value } else { mq.query(&a) };
                            let ux = self.s.add_sink(a, sink_value)?;
                            self.s.add_edge(v, ux, label)?;
                        } else {
                            let ux = self.s.add_node(a)?;
                            self.s.add_edge(v, ux, label)?;
                            let next = if suffix { suf(&t, t.len() - j) } else { t.clone() };
                            let next_dot = next.flip_first()?;
                            stack.push((ux, next_dot));
                            stack.push((ux, next));
                        }
                    }
                }
                placed = true;
                break;
            }
            if !placed {
                return Err(LearnError::MuStreak { from: base, label: t });
            }
        }
        Ok(())
    }
}

/// Counts and optionally records the learner's membership queries.
struct QueryLog<'a> {
    oracle: &'a mut dyn MembershipOracle,
    count: u64,
    events: Option<Vec<Event>>,
}

impl MembershipOracle for QueryLog<'_> {
    fn query(&mut self, a: &BitString) -> Value {
        self.count += 1;
        let value = self.oracle.query(a);
        if let Some(events) = &mut self.events {
            events.push(Event::Membership { input: a.clone(), value });
        }
        value
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

impl QueryLog<'_> {
    fn record(&mut self, event: Event) {
        if let Some(events) = &mut self.events {
            events.push(event);
        }
    }
}

/// Learns the function behind `mq`/`eq` over `m` variables.
pub fn learn(
    m: usize,
    mq: &mut dyn MembershipOracle,
    eq: &mut dyn EquivalenceOracle,
    config: &LearnerConfig,
) -> Result<LearnOutcome, LearnError> {
    let mut log = QueryLog { oracle: mq, count: 0, events: config.record_events.then(Vec::new) };
    let k = config.k_hint.unwrap_or(1).max(1);
    let mut eq_count = 0u64;
    let mut ask = |log: &mut QueryLog, h: &Omtbdd, nodes: usize| -> Result<Option<BitString>, LearnError> {
        eq_count += 1;
        let answer = eq.check(h);
        log.record(Event::Equivalence {
            index: eq_count,
            hypothesis_nodes: nodes,
            counterexample: answer.counterexample().cloned(),
        });
        match answer {
            EqResult::Yes => Ok(None),
            EqResult::No(e) if e.len() != m => {
                Err(LearnError::CounterexampleLength { input: e, expected: m })
            }
            EqResult::No(e) => Ok(Some(e)),
        }
    };

    let zero = Omtbdd::constant(m, k, 0);
    let Some(e1) = ask(&mut log, &zero, 1)? else {
        return Ok(finish(zero, log, eq_count, Vec::new(), None));
    };
    let l1 = log.query(&e1);
    if l1 == 0 {
        return Err(LearnError::NotACounterexample { input: e1, value: 0 });
    }
    let constant = Omtbdd::constant(m, k, l1);
    let Some(mut e) = ask(&mut log, &constant, 1)? else {
        return Ok(finish(constant, log, eq_count, Vec::new(), None));
    };
    let mut l = log.query(&e);
    if l == l1 {
        return Err(LearnError::NotACounterexample { input: e, value: l });
    }

    let mut state = LearnerState::initial(m, &e1, l1, &e, l, &mut log)?;
    let verify = |state: &LearnerState, updates: usize| -> Result<(), LearnError> {
        if let Some(target) = &config.check_against {
            let report = state.check(target, config.exhaustive_limit);
            if !report.ok() {
                return Err(LearnError::ConditionsViolated { updates, report });
            }
        }
        Ok(())
    };
    verify(&state, 0)?;

    let mut updates = Vec::new();
    loop {
        if state.s.eval(&e)? == l {
            let h = state.s.extract(k)?;
            match ask(&mut log, &h, state.s.node_count())? {
                None => {
                    let diagram = h.reduce();
                    return Ok(finish(diagram, log, eq_count, updates, Some(state)));
                }
                Some(next) => {
                    e = next;
                    l = log.query(&e);
                    if state.s.eval(&e)? == l {
                        return Err(LearnError::NotACounterexample { input: e, value: l });
                    }
                }
            }
        }
        let record = state.update(&e, l, &mut log, config.addedge_suffix)?;
        log.record(Event::Update {
            kind: record.kind,
            counterexample: e.clone(),
            i: record.i,
            j: record.j,
            new_node: record.new_node.clone(),
            dummy_promoted: record.dummy_promoted,
            nodes_before: record.nodes_before,
            nodes_after: record.nodes_after,
        });
        updates.push(record);
        verify(&state, updates.len())?;
    }
}

fn finish(
    diagram: Omtbdd,
    mut log: QueryLog,
    eq: u64,
    updates: Vec<UpdateRecord>,
    state: Option<LearnerState>,
) -> LearnOutcome {
    let mq = log.count;
    log.record(Event::Done { nodes: diagram.node_count(), mq, eq });
    LearnOutcome { diagram, mq, eq, updates, events: log.events.unwrap_or_default(), state }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Node;
    use crate::oracles::oracles_from_target;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn run(target: &Omtbdd) -> LearnOutcome {
        let (mut mq, mut eq) = oracles_from_target(target);
        let config = LearnerConfig { check_against: Some(target.clone()), ..Default::default() };
        let out = learn(target.m(), &mut mq, &mut eq, &config).unwrap();
        assert_eq!(out.mq, mq.queries());
        assert_eq!(out.eq, eq.queries());
        out
    }

    #[test]
    fn constants() {
        let out = run(&Omtbdd::constant(5, 2, 0));
        assert_eq!((out.eq, out.mq), (1, 0));
        let out = run(&Omtbdd::constant(5, 4, 3));
        assert_eq!((out.eq, out.mq), (2, 1));
        assert_eq!(out.diagram, Omtbdd::constant(5, 4, 3));
    }

    #[test]
    fn one_variable_functions() {
        for (a, b) in [(0, 1), (1, 0), (2, 0), (1, 3)] {
            let nodes =
                vec![Node::Branch { var: 1, lo: 1, hi: 2 }, Node::Sink { value: a }, Node::Sink { value: b }];
            let target = Omtbdd::new(1, 4, nodes, 0).unwrap();
            let out = run(&target);
            assert!(out.diagram.equivalent(&target).unwrap().is_yes());
        }
    }

    #[test]
    fn initial_hypothesis_on_the_worked_example_inputs() {
        // a target consistent with D(10100100)=1 and D(01111100)=0
        let table: Vec<Value> = (0..256u64)
            .map(|x| {
                let a = BitString::from_index(x, 8);
                if a.bit(4) == 0 && a.bit(0) == 1 {
                    1
                } else {
                    0
                }
            })
            .collect();
        let target = Omtbdd::from_truth_table(8, 2, &table).unwrap();
        let (mut mq, _) = oracles_from_target(&target);
        let state = LearnerState::initial(8, &bs("10100100"), 1, &bs("01111100"), 0, &mut mq).unwrap();
        assert!(state.s.has_dummy_root());
        assert!(state.s.lookup(&bs("1010")).is_some());
        assert!(state.s.lookup(&bs("10100100")).is_some());
        assert!(state.s.lookup(&bs("10101100")).is_some());
        assert_eq!(state.trees[4].last_twin_test_label(&bs("1010")).unwrap(), &bs("0100"));
        assert!(mq.queries() <= 3);
    }

    #[test]
    fn bounds() {
        assert_eq!(query_bounds(3, 1), (54, 3));
        assert_eq!(query_bounds(100, 3200), (2 * 100 * (12 + 300), 100));
    }
}
