use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::diagram::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateKind {
    NodeSplit,
    NewBranchingNode,
}

/// One record of a learning run, written as a JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Equivalence {
        index: u64,
        hypothesis_nodes: usize,
        counterexample: Option<BitString>,
    },
    Membership {
        input: BitString,
        value: Value,
    },
    Update {
        kind: UpdateKind,
        counterexample: BitString,
        /// 1-based position on the counterexample's path.
        i: usize,
        /// Crossover index of a branching-node update.
        j: Option<usize>,
        new_node: BitString,
        dummy_promoted: bool,
        nodes_before: usize,
        nodes_after: usize,
    },
    Done {
        nodes: usize,
        mq: u64,
        eq: u64,
    },
}

pub fn write_events<W: Write>(events: &[Event], mut out: W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_events(text: &str) -> Result<Vec<Event>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
