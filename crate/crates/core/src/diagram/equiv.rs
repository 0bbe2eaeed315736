use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{DiagramError, Node, NodeId, Omtbdd};
use crate::bits::BitString;

/// Answer to an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqResult {
    Yes,
    /// A full-length assignment on which the two functions differ.
    No(BitString),
}

impl EqResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, EqResult::Yes)
    }

    pub fn counterexample(&self) -> Option<&BitString> {
        match self {
            EqResult::Yes => None,
            EqResult::No(e) => Some(e),
        }
    }
}

struct Frame {
    a: NodeId,
    b: NodeId,
    var: usize,
    next_bit: u8,
}

impl Omtbdd {
    /// Decides functional equality by a synchronized walk over node pairs.
    ///
    /// On a mismatch the returned counterexample follows the distinguishing
    /// path; variables not tested along it are set to 0.
    pub fn equivalent(&self, other: &Omtbdd) -> Result<EqResult, DiagramError> {
        if self.m != other.m {
            return Err(DiagramError::VariableMismatch { left: self.m, right: other.m });
        }
        let mut visited: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut stack: Vec<Frame> = Vec::new();
        visited.insert((self.root, other.root));
        if let Some(frame) = self.open(other, self.root, other.root) {
            stack.push(frame);
        } else if self.sink_value(self.root) != other.sink_value(other.root) {
            return Ok(EqResult::No(BitString::zeros(self.m)));
        }

        while let Some(top) = stack.last_mut() {
            if top.next_bit > 1 {
                stack.pop();
                continue;
            }
            let bit = top.next_bit;
            top.next_bit += 1;
            let a = step(self, top.a, top.var, bit);
            let b = step(other, top.b, top.var, bit);
            if !visited.insert((a, b)) {
                continue;
            }
            match self.open(other, a, b) {
                Some(frame) => stack.push(frame),
                None => {
                    if self.sink_value(a) != other.sink_value(b) {
                        let mut bits = vec![0u8; self.m];
                        for f in &stack {
                            bits[f.var - 1] = f.next_bit - 1;
                        }
                        return Ok(EqResult::No(BitString::from_bits(bits)));
                    }
                }
            }
        }
        Ok(EqResult::Yes)
    }

    fn open(&self, other: &Omtbdd, a: NodeId, b: NodeId) -> Option<Frame> {
        let var = self.var_of(a).min(other.var_of(b));
        (var <= self.m).then_some(Frame { a, b, var, next_bit: 0 })
    }

    fn sink_value(&self, id: NodeId) -> Option<u32> {
        match self.nodes[id] {
            Node::Sink { value } => Some(value),
            Node::Branch { .. } => None,
        }
    }
}

fn step(d: &Omtbdd, at: NodeId, var: usize, bit: u8) -> NodeId {
    match d.nodes[at] {
        Node::Branch { var: v, lo, hi } if v == var => {
            if bit == 0 {
                lo
            } else {
                hi
            }
        }
        _ => at,
    }
}
