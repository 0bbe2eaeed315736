//! Compiling threshold-tree classifiers into diagrams.
//!
//! Each distinct split condition becomes one Boolean variable, the
//! variables are ordered by how often one condition sits above another in
//! the trees, and the diagram is learned with the classifier answering
//! membership queries and a labelled dataset answering equivalence queries.

mod classifier;
mod compile;
mod ordering;

use std::collections::HashSet;
use std::io::Read;

use thiserror::Error;

use crate::bits::BitString;
use crate::diagram::{DiagramError, ParseError, Value};
use crate::learner::LearnError;
use crate::oracles::{MembershipOracle, OracleError};

pub use classifier::{Tree, TreeClassifier, TreeNode};
pub use compile::{compile_classifier, truth_table, CompileReport, Compiled, EqMode, EXACT_LIMIT};
pub use ordering::{ancestor_counts, order_from_counts, order_variables};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("expected {expected} feature values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("dataset row {row}: {message}")]
    Data { row: usize, message: String },
    #[error("exact equivalence needs at most {max} conditions, found {got}")]
    TooManyConditions { max: usize, got: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// The split `value[feature] <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub feature: usize,
    pub threshold: f64,
}

impl Condition {
    pub fn holds(&self, x: &[f64]) -> bool {
        x[self.feature] <= self.threshold
    }

    fn key(&self) -> (usize, u64) {
        (self.feature, self.threshold.to_bits())
    }
}

/// Distinct conditions in order of first appearance, trees in order and
/// each tree in preorder.
pub fn extract_conditions(c: &TreeClassifier) -> Vec<Condition> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tree in &c.trees {
        for ix in tree.preorder() {
            if let TreeNode::Split { feature, threshold, .. } = tree.nodes[ix] {
                let cond = Condition { feature, threshold };
                if seen.insert(cond.key()) {
                    out.push(cond);
                }
            }
        }
    }
    out
}

/// Position of `cond` in `conds`, matching thresholds bit for bit.
fn position(conds: &[Condition], cond: Condition) -> Option<usize> {
    conds.iter().position(|c| c.key() == cond.key())
}

pub fn binarize(x: &[f64], conds: &[Condition]) -> Result<BitString, PipelineError> {
    if let Some(c) = conds.iter().find(|c| c.feature >= x.len()) {
        return Err(PipelineError::Arity { expected: c.feature + 1, got: x.len() });
    }
    Ok(BitString::from_bits(conds.iter().map(|c| c.holds(x) as u8).collect()))
}

/// Answers a bit string by running the classifier with split `j` reading
/// the bit of its condition.
#[derive(Debug, Clone)]
pub struct ClassifierOracle<'a> {
    classifier: &'a TreeClassifier,
    /// Variable index of every split node, per tree.
    slots: Vec<Vec<usize>>,
    m: usize,
    count: u64,
}

impl<'a> ClassifierOracle<'a> {
    /// Every condition used by `c` must appear in `conds`.
    pub fn new(c: &'a TreeClassifier, conds: &[Condition]) -> Result<Self, PipelineError> {
        let mut slots = Vec::with_capacity(c.trees.len());
        for (t, tree) in c.trees.iter().enumerate() {
            let mut per = vec![usize::MAX; tree.nodes.len()];
            for (ix, node) in tree.nodes.iter().enumerate() {
                if let TreeNode::Split { feature, threshold, .. } = *node {
                    per[ix] = position(conds, Condition { feature, threshold }).ok_or_else(|| {
                        PipelineError::Schema {
                            path: format!("tree {t}/node {ix}"),
                            message: "condition missing from the variable list".into(),
                        }
                    })?;
                }
            }
            slots.push(per);
        }
        Ok(ClassifierOracle { classifier: c, slots, m: conds.len(), count: 0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn answer(&self, bits: &[u8]) -> Value {
        self.classifier.vote(|t, tree| tree.walk(|ix| bits[self.slots[t][ix]] == 1))
    }
}

impl MembershipOracle for ClassifierOracle<'_> {
    fn query(&mut self, a: &BitString) -> Value {
        self.count += 1;
        self.answer(a.bits())
    }
    fn queries(&self) -> u64 {
        self.count
    }
}

/// One labelled row of real-valued features.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub features: Vec<f64>,
    pub label: Value,
}

/// Reads CSV rows: feature columns followed by an integer label. A first
/// record that does not parse as numbers is taken as a header.
pub fn read_rows(input: impl Read) -> Result<Vec<Row>, PipelineError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PipelineError::Data { row: i + 1, message: e.to_string() })?;
        if record.len() < 2 {
            return Err(PipelineError::Data {
                row: i + 1,
                message: "need at least one feature and a label".into(),
            });
        }
        let parsed: Result<Vec<f64>, _> =
            record.iter().take(record.len() - 1).map(str::parse::<f64>).collect();
        let label = record[record.len() - 1].parse::<Value>();
        match (parsed, label) {
            (Ok(features), Ok(label)) => rows.push(Row { features, label }),
            _ if i == 0 => continue,
            _ => {
                return Err(PipelineError::Data {
                    row: i + 1,
                    message: format!("cannot parse `{}`", record.iter().collect::<Vec<_>>().join(",")),
                })
            }
        }
    }
    Ok(rows)
}
