//! Query-count sweeps over random targets.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::Value;
use crate::generator::{generate, GenError, GenParams};
use crate::learner::{learn, query_bounds, LearnError, LearnerConfig};
use crate::oracles::oracles_from_target;

/// Environment variable holding the worker count for sweeps.
pub const THREADS_ENV: &str = "OMTBDD_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Nodes,
    Vars,
    Leaves,
}

impl FromStr for Axis {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nodes" | "n" => Ok(Axis::Nodes),
            "vars" | "m" => Ok(Axis::Vars),
            "leaves" | "k" => Ok(Axis::Leaves),
            _ => Err(SweepError::Spec(format!("unknown axis `{s}` (nodes, vars, leaves)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<usize>,
    pub n: usize,
    pub m: usize,
    pub k: Value,
    pub trials: usize,
    pub seed: u64,
    /// Write 0 into `wall_ms` so repeated runs are byte-identical.
    pub deterministic: bool,
}

impl SweepSpec {
    pub fn new(axis: Axis, grid: Vec<usize>, n: usize, m: usize, k: Value) -> Self {
        SweepSpec { axis, grid, n, m, k, trials: 10, seed: 0, deterministic: false }
    }

    /// `(n, m, k)` of one grid value.
    pub fn cell(&self, value: usize) -> (usize, usize, Value) {
        match self.axis {
            Axis::Nodes => (value, self.m, self.k),
            Axis::Vars => (self.n, value, self.k),
            Axis::Leaves => (self.n, self.m, value as Value),
        }
    }

    pub fn trial_seed(&self, cell: usize, trial: usize) -> u64 {
        self.seed.wrapping_add((cell * self.trials + trial) as u64)
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Spec(String),
    #[error("cell {value}, trial {trial}: {source}")]
    Generate { value: usize, trial: usize, source: GenError },
    #[error("cell {value}, trial {trial}: {source}")]
    Learn { value: usize, trial: usize, source: LearnError },
    #[error("cell {value}, trial {trial}: the output differs from the target")]
    Inexact { value: usize, trial: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub axis_value: usize,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: Value,
    pub mq: u64,
    pub eq: u64,
    pub mq_bound: u64,
    pub eq_bound: u64,
    pub wall_ms: u64,
    pub bound_violation: bool,
}

/// Runs one trial: generate, learn with exact oracles, compare counters
/// with the bounds.
pub fn run_trial(n: usize, m: usize, k: Value, seed: u64) -> Result<SweepRow, SweepError> {
    let start = Instant::now();
    let target = generate(&GenParams::new(n, m, k, seed)).map_err(|source| SweepError::Generate {
        value: 0,
        trial: 0,
        source,
    })?;
    let (mut mq, mut eq) = oracles_from_target(&target);
    let out = learn(m, &mut mq, &mut eq, &LearnerConfig::default()).map_err(|source| SweepError::Learn {
        value: 0,
        trial: 0,
        source,
    })?;
    if !out.diagram.same_structure(&target) {
        return Err(SweepError::Inexact { value: 0, trial: 0 });
    }
    let (mq_bound, eq_bound) = query_bounds(target.node_count(), m);
    Ok(SweepRow {
        axis_value: 0,
        trial: 0,
        seed,
        n: target.node_count(),
        m,
        k,
        mq: out.mq,
        eq: out.eq,
        mq_bound,
        eq_bound,
        wall_ms: start.elapsed().as_millis() as u64,
        bound_violation: out.mq > mq_bound || out.eq > eq_bound,
    })
}

/// Runs every cell and trial, in parallel, returning rows in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    if spec.grid.is_empty() {
        return Err(SweepError::Spec("the grid is empty".into()));
    }
    if spec.trials == 0 {
        return Err(SweepError::Spec("trials must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize, usize)> = spec
        .grid
        .iter()
        .enumerate()
        .flat_map(|(cell, &value)| (0..spec.trials).map(move |trial| (cell, value, trial)))
        .collect();
    let run = || {
        jobs.par_iter()
            .map(|&(cell, value, trial)| {
                let (n, m, k) = spec.cell(value);
                let relabel = |e: SweepError| match e {
                    SweepError::Generate { source, .. } => SweepError::Generate { value, trial, source },
                    SweepError::Learn { source, .. } => SweepError::Learn { value, trial, source },
                    SweepError::Inexact { .. } => SweepError::Inexact { value, trial },
                    other => other,
                };
                let mut row = run_trial(n, m, k, spec.trial_seed(cell, trial)).map_err(relabel)?;
                row.axis_value = value;
                row.trial = trial;
                if spec.deterministic {
                    row.wall_ms = 0;
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, SweepError>>()
    };
    match std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SweepError::Spec(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Mean `(mq, eq)` per grid value, in grid order.
pub fn cell_means(rows: &[SweepRow]) -> Vec<(usize, f64, f64)> {
    let mut out: Vec<(usize, f64, f64, usize)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some(last) if last.0 == row.axis_value => {
                last.1 += row.mq as f64;
                last.2 += row.eq as f64;
                last.3 += 1;
            }
            _ => out.push((row.axis_value, row.mq as f64, row.eq as f64, 1)),
        }
    }
    out.into_iter().map(|(v, mq, eq, c)| (v, mq / c as f64, eq / c as f64)).collect()
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
