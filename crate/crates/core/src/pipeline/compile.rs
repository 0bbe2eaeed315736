use std::fmt;

use serde::Serialize;

use crate::diagram::{Omtbdd, Value};
use crate::learner::{learn, LearnerConfig};
use crate::oracles::{DatasetEquivalence, EquivalenceOracle, TargetEquivalence};

use super::{
    binarize, extract_conditions, order_variables, ClassifierOracle, Condition, PipelineError, Row,
    TreeClassifier,
};

/// Where equivalence answers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqMode {
    /// Agreement with the correctly predicted dataset rows.
    Dataset,
    /// The full truth table of the classifier oracle.
    Exact,
}

/// Largest condition count accepted by [`EqMode::Exact`].
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileReport {
    pub distinct_conditions: usize,
    pub classes: Value,
    pub nodes: usize,
    pub sinks: usize,
    pub mq: u64,
    pub eq: u64,
    pub rows: usize,
    pub used_rows: usize,
    /// Fraction of used rows on which the diagram matches the label.
    pub agreement: f64,
}

impl fmt::Display for CompileReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "distinct_conditions={}", self.distinct_conditions)?;
        writeln!(f, "classes={}", self.classes)?;
        writeln!(f, "nodes={}", self.nodes)?;
        writeln!(f, "sinks={}", self.sinks)?;
        writeln!(f, "mq={}", self.mq)?;
        writeln!(f, "eq={}", self.eq)?;
        writeln!(f, "rows={}", self.rows)?;
        writeln!(f, "used_rows={}", self.used_rows)?;
        writeln!(f, "agreement={:.4}", self.agreement)
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub diagram: Omtbdd,
    /// Condition of variable `x_{j+1}` at index `j`.
    pub conditions: Vec<Condition>,
    pub report: CompileReport,
}

impl Compiled {
    /// Evaluates the diagram on real-valued features.
    pub fn predict(&self, x: &[f64]) -> Result<Value, PipelineError> {
        Ok(self.diagram.eval_bits(binarize(x, &self.conditions)?.bits()))
    }
}

pub fn compile_classifier(c: &TreeClassifier, rows: &[Row], mode: EqMode) -> Result<Compiled, PipelineError> {
    let conditions = order_variables(c, &extract_conditions(c));
    let m = conditions.len();
    let mut samples = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.features.len() != c.features {
            return Err(PipelineError::Data {
                row: i + 1,
                message: format!("expected {} features, got {}", c.features, row.features.len()),
            });
        }
        if c.predict(&row.features)? == row.label {
            samples.push((binarize(&row.features, &conditions)?, row.label));
        }
    }

    let mut mq = ClassifierOracle::new(c, &conditions)?;
    let mut eq: Box<dyn EquivalenceOracle> = match mode {
        EqMode::Dataset => Box::new(DatasetEquivalence::new(m, samples.clone())?),
        EqMode::Exact => {
            if m > EXACT_LIMIT {
                return Err(PipelineError::TooManyConditions { max: EXACT_LIMIT, got: m });
            }
            Box::new(TargetEquivalence::new(&truth_table(&mq, c.classes)?))
        }
    };
    let config = LearnerConfig { k_hint: Some(c.classes), ..LearnerConfig::default() };
    let outcome = learn(m, &mut mq, &mut *eq, &config)?;
    let diagram = outcome.diagram;
    let agree = samples.iter().filter(|(a, v)| diagram.eval_bits(a.bits()) == *v).count();
    let report = CompileReport {
        distinct_conditions: m,
        classes: c.classes,
        nodes: diagram.node_count(),
        sinks: diagram.sink_count(),
        mq: outcome.mq,
        eq: outcome.eq,
        rows: rows.len(),
        used_rows: samples.len(),
        agreement: if samples.is_empty() { 1.0 } else { agree as f64 / samples.len() as f64 },
    };
    Ok(Compiled { diagram, conditions, report })
}

/// Reduced diagram of the classifier oracle built from all `2^m` inputs.
pub fn truth_table(mq: &ClassifierOracle<'_>, classes: Value) -> Result<Omtbdd, PipelineError> {
    let m = mq.m();
    let values: Vec<Value> = (0..1u64 << m)
        .map(|x| {
            let bits: Vec<u8> = (0..m).map(|j| ((x >> (m - 1 - j)) & 1) as u8).collect();
            mq.answer(&bits)
        })
        .collect();
    Ok(Omtbdd::from_truth_table(m, classes, &values)?)
}
