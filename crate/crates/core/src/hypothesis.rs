//! The learner's working hypothesis: a diagram whose nodes are named by
//! access strings and whose edges carry the full bit string between the
//! two levels they connect.
//!
//! The root always has id `λ`. While it is a dummy it has a single edge,
//! followed regardless of the input, to the real top node.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitString;
use crate::diagram::{DiagramError, Node, Omtbdd, Value};

/// Index into the node arena. Never reused.
pub type NodeIx = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypKind {
    /// Tests `x_{|id|+1}`.
    Internal,
    Sink(Value),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub to: NodeIx,
    pub label: BitString,
}

#[derive(Debug, Clone)]
pub struct HypNode {
    pub id: BitString,
    pub kind: HypKind,
    /// Outgoing edges keyed by the first bit of their label.
    out: [Option<Edge>; 2],
    /// `(from, slot)` of every edge entering this node.
    incoming: Vec<(NodeIx, u8)>,
}

impl HypNode {
    pub fn out(&self, bit: u8) -> Option<&Edge> {
        self.out[bit as usize].as_ref()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u8, &Edge)> {
        self.out.iter().enumerate().filter_map(|(b, e)| e.as_ref().map(|e| (b as u8, e)))
    }

    pub fn incoming(&self) -> &[(NodeIx, u8)] {
        &self.incoming
    }

    pub fn is_sink(&self) -> bool {
        matches!(self.kind, HypKind::Sink(_))
    }

    pub fn value(&self) -> Option<Value> {
        match self.kind {
            HypKind::Sink(v) => Some(v),
            HypKind::Internal => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypError {
    #[error("node id {0:?} already exists")]
    DuplicateId(BitString),
    #[error("sink id {id:?} must have length {m}")]
    SinkLength { id: BitString, m: usize },
    #[error("internal node id {id:?} must be shorter than {m}")]
    InternalLength { id: BitString, m: usize },
    #[error("edge {from:?} -> {to:?}: label {label:?} must have length {expected}")]
    LabelLength { from: BitString, to: BitString, label: BitString, expected: usize },
    #[error("node {from:?} already has an edge starting with bit {bit}")]
    SlotTaken { from: BitString, bit: u8 },
    #[error("the dummy root can hold only one edge")]
    DummyEdge,
    #[error("node {from:?} has no edge starting with bit {bit}")]
    MissingEdge { from: BitString, bit: u8 },
    #[error("edges cannot leave sink {0:?}")]
    FromSink(BitString),
    #[error("assignment has length {got}, expected {expected}")]
    InputLength { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct Omtbddas {
    m: usize,
    nodes: Vec<HypNode>,
    index: HashMap<BitString, NodeIx>,
    dummy: bool,
}

impl Omtbddas {
    pub const ROOT: NodeIx = 0;

    /// A hypothesis holding only the root `λ`.
    pub fn new(m: usize, dummy: bool) -> Self {
        let root = HypNode {
            id: BitString::empty(),
            kind: HypKind::Internal,
            out: [None, None],
            incoming: Vec::new(),
        };
        let mut index = HashMap::new();
        index.insert(BitString::empty(), Self::ROOT);
        Omtbddas { m, nodes: vec![root], index, dummy }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn has_dummy_root(&self) -> bool {
        self.dummy
    }

    /// Turns the dummy root into a real node testing `x_1`.
    pub fn promote_root(&mut self) {
        self.dummy = false;
    }

    pub fn node(&self, ix: NodeIx) -> &HypNode {
        &self.nodes[ix]
    }

    pub fn id(&self, ix: NodeIx) -> &BitString {
        &self.nodes[ix].id
    }

    pub fn lookup(&self, id: &BitString) -> Option<NodeIx> {
        self.index.get(id).copied()
    }

    /// All stored nodes in creation order, the dummy root included.
    pub fn iter(&self) -> impl Iterator<Item = (NodeIx, &HypNode)> {
        self.nodes.iter().enumerate()
    }

    /// Real nodes (the represented diagram's node set).
    pub fn real_nodes(&self) -> impl Iterator<Item = (NodeIx, &HypNode)> {
        let skip = usize::from(self.dummy);
        self.nodes.iter().enumerate().skip(skip)
    }

    /// `|V(S)|`: the number of real nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - usize::from(self.dummy)
    }

    /// Every edge as `(from, slot, edge)`.
    pub fn edges(&self) -> Vec<(NodeIx, u8, Edge)> {
        let mut out = Vec::new();
        for (ix, node) in self.nodes.iter().enumerate() {
            for (bit, e) in node.edges() {
                out.push((ix, bit, e.clone()));
            }
        }
        out
    }

    pub fn add_node(&mut self, id: BitString) -> Result<NodeIx, HypError> {
        if id.len() >= self.m {
            return Err(HypError::InternalLength { id, m: self.m });
        }
        self.insert(id, HypKind::Internal)
    }

    pub fn add_sink(&mut self, id: BitString, value: Value) -> Result<NodeIx, HypError> {
        if id.len() != self.m {
            return Err(HypError::SinkLength { id, m: self.m });
        }
        self.insert(id, HypKind::Sink(value))
    }

    fn insert(&mut self, id: BitString, kind: HypKind) -> Result<NodeIx, HypError> {
        if self.index.contains_key(&id) {
            return Err(HypError::DuplicateId(id));
        }
        let ix = self.nodes.len();
        self.index.insert(id.clone(), ix);
        self.nodes.push(HypNode { id, kind, out: [None, None], incoming: Vec::new() });
        Ok(ix)
    }

    /// Adds an edge into the slot named by the label's first bit.
    pub fn add_edge(&mut self, from: NodeIx, to: NodeIx, label: BitString) -> Result<(), HypError> {
        let (f, t) = (&self.nodes[from], &self.nodes[to]);
        if f.is_sink() {
            return Err(HypError::FromSink(f.id.clone()));
        }
        let expected = t.id.len().checked_sub(f.id.len()).unwrap_or(0);
        if label.is_empty() || label.len() != expected || t.id.len() <= f.id.len() {
            return Err(HypError::LabelLength { from: f.id.clone(), to: t.id.clone(), label, expected });
        }
        if from == Self::ROOT && self.dummy && f.edges().next().is_some() {
            return Err(HypError::DummyEdge);
        }
        let bit = label.bit(0);
        if f.out[bit as usize].is_some() {
            return Err(HypError::SlotTaken { from: f.id.clone(), bit });
        }
        self.nodes[from].out[bit as usize] = Some(Edge { to, label });
        self.nodes[to].incoming.push((from, bit));
        Ok(())
    }

    pub fn remove_edge(&mut self, from: NodeIx, bit: u8) -> Result<Edge, HypError> {
        let edge = self.nodes[from].out[bit as usize]
            .take()
            .ok_or_else(|| HypError::MissingEdge { from: self.nodes[from].id.clone(), bit })?;
        let incoming = &mut self.nodes[edge.to].incoming;
        let pos = incoming.iter().position(|&x| x == (from, bit)).expect("reverse index in sync");
        incoming.swap_remove(pos);
        Ok(edge)
    }

    /// Replaces the edge in `slot` of `from` by one to `to` labeled `label`.
    pub fn redirect(&mut self, from: NodeIx, bit: u8, to: NodeIx, label: BitString) -> Result<(), HypError> {
        let old = self.remove_edge(from, bit)?;
        if let Err(err) = self.add_edge(from, to, label) {
            self.add_edge(from, old.to, old.label).expect("restoring a removed edge");
            return Err(err);
        }
        Ok(())
    }

    /// Nodes visited by `e` from the root down to a sink, each paired with
    /// the slot of the edge taken out of it (`None` at the sink).
    pub fn trace_path(&self, e: &BitString) -> Result<Vec<(NodeIx, Option<u8>)>, HypError> {
        if e.len() != self.m {
            return Err(HypError::InputLength { expected: self.m, got: e.len() });
        }
        let mut out = Vec::new();
        let mut at = Self::ROOT;
        loop {
            let node = &self.nodes[at];
            if node.is_sink() {
                out.push((at, None));
                return Ok(out);
            }
            let bit = if at == Self::ROOT && self.dummy {
                node.edges().next().map(|(b, _)| b).ok_or(HypError::DummyEdge)?
            } else {
                e.bit(node.id.len())
            };
            let edge = node.out(bit).ok_or_else(|| HypError::MissingEdge { from: node.id.clone(), bit })?;
            out.push((at, Some(bit)));
            at = edge.to;
        }
    }

    /// Value of the sink reached by `e`.
    pub fn eval(&self, e: &BitString) -> Result<Value, HypError> {
        let path = self.trace_path(e)?;
        let (last, _) = path[path.len() - 1];
        Ok(self.nodes[last].value().expect("paths end at sinks"))
    }

    /// The represented diagram: the dummy root is dropped and every edge
    /// keeps only its first bit. `k` is raised to cover all sink values.
    pub fn extract(&self, k: Value) -> Result<Omtbdd, DiagramError> {
        let start = if self.dummy {
            match self.nodes[Self::ROOT].edges().next() {
                Some((_, e)) => e.to,
                None => {
                    return Err(DiagramError::InvalidNode {
                        node: Self::ROOT,
                        reason: "dummy root without an edge".into(),
                    })
                }
            }
        } else {
            Self::ROOT
        };
        let mut k = k;
        let mut map: HashMap<NodeIx, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![start];
        while let Some(ix) = stack.pop() {
            if map.contains_key(&ix) {
                continue;
            }
            map.insert(ix, order.len());
            order.push(ix);
            for bit in [1, 0] {
                if let Some(e) = self.nodes[ix].out(bit) {
                    stack.push(e.to);
                }
            }
        }
        let mut nodes = Vec::with_capacity(order.len());
        for &ix in &order {
            let n = &self.nodes[ix];
            nodes.push(match n.kind {
                HypKind::Sink(value) => {
                    k = k.max(value + 1);
                    Node::Sink { value }
                }
                HypKind::Internal => {
                    let child = |bit: u8| {
                        n.out(bit).map(|e| map[&e.to]).ok_or_else(|| DiagramError::InvalidNode {
                            node: map[&ix],
                            reason: format!("node {:?} lacks its {bit}-edge", n.id),
                        })
                    };
                    Node::Branch { var: n.id.len() + 1, lo: child(0)?, hi: child(1)? }
                }
            });
        }
        Omtbdd::new(self.m, k, nodes, 0)
    }

    /// Text dump in the style of the diagram document, with ids and labels.
    pub fn dump(&self) -> String {
        let mut out = format!("omtbddas m={} dummy={}\n", self.m, self.dummy);
        for (ix, n) in self.nodes.iter().enumerate() {
            match n.kind {
                HypKind::Internal => {
                    writeln!(out, "node {ix} var={} id={}", n.id.len() + 1, n.id.display_id()).unwrap()
                }
                HypKind::Sink(v) => writeln!(out, "sink {ix} value={v} id={}", n.id.display_id()).unwrap(),
            }
        }
        for (from, _, e) in self.edges() {
            writeln!(out, "edge {from} {} label={}", e.to, e.label).unwrap();
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph omtbddas {\n");
        for (ix, n) in self.nodes.iter().enumerate() {
            let (shape, label) = match n.kind {
                HypKind::Sink(v) => ("box", format!("{v}\\n{}", n.id.display_id())),
                HypKind::Internal if ix == Self::ROOT && self.dummy => ("point", String::new()),
                HypKind::Internal => ("circle", format!("x{}\\n{}", n.id.len() + 1, n.id.display_id())),
            };
            writeln!(out, "  h{ix} [shape={shape},label=\"{label}\"];").unwrap();
        }
        for (from, _, e) in self.edges() {
            writeln!(out, "  h{from} -> h{} [label=\"{}\"];", e.to, e.label).unwrap();
        }
        out.push_str("}\n");
        out
    }
}
