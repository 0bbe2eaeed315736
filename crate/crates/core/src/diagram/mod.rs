//! Immutable ordered multi-terminal binary decision diagrams.
//!
//! A diagram computes a function `{0,1}^m -> {0..K-1}` under the fixed
//! variable order `x_1 < x_2 < ... < x_m`. Edges may skip variables; a
//! skipped variable is a don't-care along that edge.

mod equiv;
pub(crate) mod io;
mod reduce;

use thiserror::Error;

use crate::bits::BitString;

pub use equiv::EqResult;
pub use io::ParseError;

/// A terminal value in `0..K`.
pub type Value = u32;

/// Index into [`Omtbdd::nodes`].
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Tests variable `x_var` (1-based); `lo` is followed when it is 0.
    Branch {
        var: usize,
        lo: NodeId,
        hi: NodeId,
    },
    Sink {
        value: Value,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("expected an assignment of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("diagrams range over different variable counts ({left} vs {right})")]
    VariableMismatch { left: usize, right: usize },
    #[error("node {node}: {reason}")]
    InvalidNode { node: NodeId, reason: String },
    #[error("root {0} does not exist")]
    InvalidRoot(NodeId),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A rooted OMTBDD. Construction validates the ordering and value range;
/// the value is never mutated afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Omtbdd {
    m: usize,
    k: Value,
    nodes: Vec<Node>,
    root: NodeId,
}

impl Omtbdd {
    pub fn new(m: usize, k: Value, nodes: Vec<Node>, root: NodeId) -> Result<Self, DiagramError> {
        if root >= nodes.len() {
            return Err(DiagramError::InvalidRoot(root));
        }
        let d = Omtbdd { m, k, nodes, root };
        for (id, node) in d.nodes.iter().enumerate() {
            match *node {
                Node::Sink { value } => {
                    if value >= k {
                        return Err(DiagramError::InvalidNode {
                            node: id,
                            reason: format!("sink value {value} outside 0..{k}"),
                        });
                    }
                }
                Node::Branch { var, lo, hi } => {
                    if var == 0 || var > m {
                        return Err(DiagramError::InvalidNode {
                            node: id,
                            reason: format!("variable x{var} outside x1..x{m}"),
                        });
                    }
                    for child in [lo, hi] {
                        if child >= d.nodes.len() {
                            return Err(DiagramError::InvalidNode {
                                node: id,
                                reason: format!("child {child} does not exist"),
                            });
                        }
                        if d.var_of(child) <= var {
                            return Err(DiagramError::InvalidNode {
                                node: id,
                                reason: format!("edge to node {child} violates the variable order"),
                            });
                        }
                    }
                }
            }
        }
        Ok(d)
    }

    /// The diagram made of a single sink.
    pub fn constant(m: usize, k: Value, value: Value) -> Self {
        Omtbdd { m, k: k.max(value + 1), nodes: vec![Node::Sink { value }], root: 0 }
    }

    /// Complete decision tree over `values` (indexed by the assignment read
    /// as a big-endian integer), reduced.
    pub fn from_truth_table(m: usize, k: Value, values: &[Value]) -> Result<Self, DiagramError> {
        if values.len() != 1usize << m {
            return Err(DiagramError::LengthMismatch { expected: 1 << m, got: values.len() });
        }
        let mut nodes: Vec<Node> = values.iter().map(|&value| Node::Sink { value }).collect();
        let mut level: Vec<NodeId> = (0..values.len()).collect();
        for var in (1..=m).rev() {
            level = level
                .chunks(2)
                .map(|pair| {
                    nodes.push(Node::Branch { var, lo: pair[0], hi: pair[1] });
                    nodes.len() - 1
                })
                .collect();
        }
        Ok(Omtbdd::new(m, k, nodes, level[0])?.reduce())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> Value {
        self.k
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    /// Number of stored nodes, sinks included. Equals the size of the
    /// function's reduced form once [`Omtbdd::reduce`] has been applied.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn sink_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Sink { .. })).count()
    }

    /// Variable tested at `id`; sinks sit at level `m + 1`.
    pub fn var_of(&self, id: NodeId) -> usize {
        match self.nodes[id] {
            Node::Branch { var, .. } => var,
            Node::Sink { .. } => self.m + 1,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.nodes[self.root], Node::Sink { .. })
    }

    pub fn eval(&self, a: &BitString) -> Result<Value, DiagramError> {
        if a.len() != self.m {
            return Err(DiagramError::LengthMismatch { expected: self.m, got: a.len() });
        }
        Ok(self.eval_bits(a.bits()))
    }

    /// Unchecked evaluation; `bits` must have length `m`.
    pub fn eval_bits(&self, bits: &[u8]) -> Value {
        let mut at = self.root;
        loop {
            match self.nodes[at] {
                Node::Sink { value } => return value,
                Node::Branch { var, lo, hi } => at = if bits[var - 1] == 0 { lo } else { hi },
            }
        }
    }

    /// The node that a partial assignment of length `L` just reaches: a
    /// node testing `x_{L+1}`, or a sink when `L = m`. `None` when the walk
    /// stops strictly inside a variable-skipping edge.
    pub fn trace_to_node(&self, a: &BitString) -> Option<NodeId> {
        let len = a.len();
        if len > self.m {
            return None;
        }
        let mut at = self.root;
        loop {
            let var = self.var_of(at);
            if len + 1 == var {
                return Some(at);
            }
            if len + 1 < var {
                return None;
            }
            match self.nodes[at] {
                Node::Branch { lo, hi, .. } => at = if a.bit(var - 1) == 0 { lo } else { hi },
                Node::Sink { .. } => unreachable!("sinks sit at level m + 1"),
            }
        }
    }

    /// The sequence of nodes visited while evaluating `a`, root first.
    pub fn path(&self, a: &BitString) -> Vec<NodeId> {
        let mut out = vec![self.root];
        let mut at = self.root;
        while let Node::Branch { var, lo, hi } = self.nodes[at] {
            at = if a.bit(var - 1) == 0 { lo } else { hi };
            out.push(at);
        }
        out
    }

    /// Same structure and root, ignoring the declared value-space size.
    pub fn same_structure(&self, other: &Omtbdd) -> bool {
        self.m == other.m && self.root == other.root && self.nodes == other.nodes
    }

    /// Copy with a different declared value-space size.
    pub fn with_k(mut self, k: Value) -> Result<Self, DiagramError> {
        self.k = k;
        Omtbdd::new(self.m, self.k, self.nodes, self.root)
    }
}
