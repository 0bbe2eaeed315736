//! White-box verification of the node, tree and edge conditions against a
//! known target. Queries issued here are not counted anywhere.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::bits::BitString;
use crate::ctree::{Classification, ClassificationTree};
use crate::diagram::Omtbdd;
use crate::hypothesis::Omtbddas;
use crate::oracles::FnOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    /// Every id is an access string of the target.
    Cn1,
    /// Sink ids carry the target's value.
    Cn2,
    /// Distinct ids reach distinct target nodes.
    Cn3,
    /// Every id classifies to itself.
    Ct1,
    /// Non-access strings classify to μ.
    Ct2,
    /// `u·l(u,v)` classifies to `v`.
    Ce1,
    /// Proper extensions of `u` along an edge label classify to μ.
    Ce2,
    /// Edge completeness of the hypothesis.
    Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub violations: Vec<Violation>,
    /// Whether CT(2) was checked over every string of every level.
    pub exhaustive: bool,
}

impl ConditionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, condition: Condition) -> usize {
        self.violations.iter().filter(|v| v.condition == condition).count()
    }

    fn push(&mut self, condition: Condition, detail: String) {
        self.violations.push(Violation { condition, detail });
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "all conditions hold");
        }
        for v in &self.violations {
            writeln!(f, "{:?}: {}", v.condition, v.detail)?;
        }
        Ok(())
    }
}

/// Checks every condition. CT(2) enumerates all strings of every level
/// when `m ≤ exhaustive_limit` and is skipped otherwise.
pub fn check_conditions(
    s: &Omtbddas,
    trees: &[ClassificationTree],
    target: &Omtbdd,
    exhaustive_limit: usize,
) -> ConditionReport {
    let d = target.reduce();
    let m = s.m();
    let mut oracle = FnOracle::new(|a: &BitString| d.eval_bits(a.bits()));
    let mut report = ConditionReport { violations: Vec::new(), exhaustive: m <= exhaustive_limit };

    let mut reached: HashMap<usize, &BitString> = HashMap::new();
    for (_, node) in s.real_nodes() {
        let id = &node.id;
        match d.trace_to_node(id) {
            None => report.push(Condition::Cn1, format!("{id:?} is not an access string")),
            Some(t) => {
                if let Some(other) = reached.insert(t, id) {
                    report.push(Condition::Cn3, format!("{id:?} and {other:?} reach the same target node"));
                }
            }
        }
        if let Some(v) = node.value() {
            let want = d.eval_bits(id.bits());
            if v != want {
                report.push(Condition::Cn2, format!("sink {id:?} holds {v}, target gives {want}"));
            }
        } else {
            for bit in 0..2 {
                if node.out(bit).is_none() {
                    report.push(Condition::Shape, format!("{id:?} lacks its {bit}-edge"));
                }
            }
        }
        if !id.is_empty() {
            let got = trees[id.len()].classify(id, &mut oracle);
            if got != Classification::Leaf(id.clone()) {
                report.push(Condition::Ct1, format!("{id:?} classifies as {got:?}"));
            }
        }
    }
    if s.has_dummy_root() && s.node(Omtbddas::ROOT).edges().count() != 1 {
        report.push(Condition::Shape, "dummy root must hold exactly one edge".into());
    }

    for (from, _, edge) in s.edges() {
        let u = s.id(from);
        let v = s.id(edge.to);
        let full = u.concat(&edge.label);
        let got = trees[v.len()].classify(&full, &mut oracle);
        if got != Classification::Leaf(v.clone()) {
            report.push(Condition::Ce1, format!("edge {u:?}->{v:?}: {full:?} gives {got:?}"));
        }
        for j in u.len() + 1..v.len() {
            let a = u.concat(&edge.label.pre(j - u.len()).expect("prefix within label"));
            let got = trees[j].classify(&a, &mut oracle);
            if got != Classification::Mu {
                report.push(Condition::Ce2, format!("edge {u:?}->{v:?}: {a:?} gives {got:?}"));
            }
        }
    }

    if report.exhaustive {
        for level in 1..=m {
            for x in 0..1u64 << level {
                let a = BitString::from_index(x, level);
                if d.trace_to_node(&a).is_some() {
                    continue;
                }
                let got = trees[level].classify(&a, &mut oracle);
                if got != Classification::Mu {
                    report.push(Condition::Ct2, format!("{a:?} gives {got:?}"));
                }
            }
        }
    }
    report
}
