//! Node classification trees.
//!
//! The tree for level `j` sorts length-`j` strings into hypothesis node ids
//! or `μ` ("reaches no node") by asking membership queries. A twin-test node
//! labeled `r` asks for `a·r` and `a·ṙ` (first bit of `r` flipped) and follows
//! its labeled edge only when the answer pair matches; otherwise it falls
//! through to the unlabeled edge, which leads towards the single `μ` leaf.
//! A single-test node asks for `a·r` and branches on the value.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitString;
use crate::diagram::Value;
use crate::oracles::MembershipOracle;

pub type TreeNodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Twin {
        test: BitString,
        /// Values at `a·r` and `a·ṙ` selecting `matched`.
        pair: (Value, Value),
        matched: TreeNodeId,
        unmatched: TreeNodeId,
    },
    Single {
        test: BitString,
        branches: BTreeMap<Value, TreeNodeId>,
    },
    Leaf(BitString),
    Mu,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Leaf(BitString),
    Mu,
    /// A single-test node had no edge for the answered value.
    Stuck {
        node: TreeNodeId,
        test: BitString,
        value: Value,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("level {level}: no leaf labeled {leaf:?}")]
    MissingLeaf { level: usize, leaf: BitString },
    #[error("level {level}: leaf label {leaf:?} already present")]
    DuplicateLeaf { level: usize, leaf: BitString },
    #[error("level {level}: no μ leaf to replace")]
    NoMuLeaf { level: usize },
    #[error("level {level}: node {node} is not a single-test node")]
    NotSingleTest { level: usize, node: TreeNodeId },
    #[error("level {level}: value {value} already has an edge at node {node}")]
    DuplicateValue { level: usize, node: TreeNodeId, value: Value },
    #[error("level {level}: no twin-test node above leaf {leaf:?}")]
    NoTwinTest { level: usize, leaf: BitString },
    #[error("level {level}: twin-test pair ({0}, {1}) must hold two different values", pair.0, pair.1)]
    EqualPair { level: usize, pair: (Value, Value) },
}

/// Classification tree for one level.
#[derive(Debug, Clone)]
pub struct ClassificationTree {
    level: usize,
    nodes: Vec<TreeNode>,
    parent: Vec<Option<TreeNodeId>>,
    leaves: HashMap<BitString, TreeNodeId>,
    mu: Option<TreeNodeId>,
}

impl ClassificationTree {
    /// A tree that classifies every string as `μ`.
    pub fn new(level: usize) -> Self {
        ClassificationTree {
            level,
            nodes: vec![TreeNode::Mu],
            parent: vec![None],
            leaves: HashMap::new(),
            mu: Some(0),
        }
    }

    /// A tree whose root is a single-test node with the given leaves.
    pub fn with_single_root(
        level: usize,
        test: BitString,
        branches: Vec<(Value, BitString)>,
    ) -> Result<Self, TreeError> {
        let mut tree = ClassificationTree {
            level,
            nodes: vec![TreeNode::Leaf(BitString::empty())],
            parent: vec![None],
            leaves: HashMap::new(),
            mu: None,
        };
        tree.install_single(0, test, branches)?;
        Ok(tree)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn root(&self) -> TreeNodeId {
        0
    }

    pub fn node(&self, id: TreeNodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn has_mu(&self) -> bool {
        self.mu.is_some()
    }

    pub fn contains_leaf(&self, id: &BitString) -> bool {
        self.leaves.contains_key(id)
    }

    pub fn leaf_labels(&self) -> impl Iterator<Item = &BitString> {
        self.leaves.keys()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len() + usize::from(self.mu.is_some())
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Twin { .. } | TreeNode::Single { .. })).count()
    }

    /// Classifies `a` (of length `level`) with membership queries: two per
    /// twin-test node visited, one per single-test node visited.
    pub fn classify<M>(&self, a: &BitString, mq: &mut M) -> Classification
    where
        M: MembershipOracle + ?Sized,
    {
        debug_assert_eq!(a.len(), self.level);
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf(id) => return Classification::Leaf(id.clone()),
                TreeNode::Mu => return Classification::Mu,
                TreeNode::Twin { test, pair, matched, unmatched } => {
                    let mut query = a.concat(test);
                    let first = mq.query(&query);
                    query_flip(&mut query, a.len());
                    let second = mq.query(&query);
                    at = if (first, second) == *pair { *matched } else { *unmatched };
                }
                TreeNode::Single { test, branches } => {
                    let value = mq.query(&a.concat(test));
                    match branches.get(&value) {
                        Some(&next) => at = next,
                        None => return Classification::Stuck { node: at, test: test.clone(), value },
                    }
                }
            }
        }
    }

    /// Label of the deepest twin-test node on the path from the root to
    /// the leaf labeled `leaf`.
    pub fn last_twin_test_label(&self, leaf: &BitString) -> Result<&BitString, TreeError> {
        let mut at = *self
            .leaves
            .get(leaf)
            .ok_or_else(|| TreeError::MissingLeaf { level: self.level, leaf: leaf.clone() })?;
        while let Some(up) = self.parent[at] {
            if let TreeNode::Twin { test, .. } = &self.nodes[up] {
                return Ok(test);
            }
            at = up;
        }
        Err(TreeError::NoTwinTest { level: self.level, leaf: leaf.clone() })
    }

    /// Replaces leaf `at` by a single-test node labeled `test` whose
    /// children are fresh leaves.
    pub fn graft_single_test(
        &mut self,
        at: &BitString,
        test: BitString,
        branches: Vec<(Value, BitString)>,
    ) -> Result<(), TreeError> {
        let slot = *self
            .leaves
            .get(at)
            .ok_or_else(|| TreeError::MissingLeaf { level: self.level, leaf: at.clone() })?;
        for (_, id) in &branches {
            if id != at && self.leaves.contains_key(id) {
                return Err(TreeError::DuplicateLeaf { level: self.level, leaf: id.clone() });
            }
        }
        self.leaves.remove(at);
        self.install_single(slot, test, branches)
    }

    /// Replaces the `μ` leaf by a twin-test node labeled `test` whose
    /// `pair` edge enters leaf `leaf` and whose other edge enters a new `μ`.
    pub fn graft_twin_test(
        &mut self,
        test: BitString,
        pair: (Value, Value),
        leaf: BitString,
    ) -> Result<(), TreeError> {
        if pair.0 == pair.1 {
            return Err(TreeError::EqualPair { level: self.level, pair });
        }
        let slot = self.mu.ok_or(TreeError::NoMuLeaf { level: self.level })?;
        if self.leaves.contains_key(&leaf) {
            return Err(TreeError::DuplicateLeaf { level: self.level, leaf });
        }
        let matched = self.push(slot, TreeNode::Leaf(leaf.clone()));
        let unmatched = self.push(slot, TreeNode::Mu);
        self.leaves.insert(leaf, matched);
        self.mu = Some(unmatched);
        self.nodes[slot] = TreeNode::Twin { test, pair, matched, unmatched };
        Ok(())
    }

    /// Adds leaf `leaf` under `value` at single-test node `node`.
    pub fn add_value_edge(
        &mut self,
        node: TreeNodeId,
        value: Value,
        leaf: BitString,
    ) -> Result<(), TreeError> {
        if self.leaves.contains_key(&leaf) {
            return Err(TreeError::DuplicateLeaf { level: self.level, leaf });
        }
        match &self.nodes[node] {
            TreeNode::Single { branches, .. } if branches.contains_key(&value) => {
                return Err(TreeError::DuplicateValue { level: self.level, node, value })
            }
            TreeNode::Single { .. } => {}
            _ => return Err(TreeError::NotSingleTest { level: self.level, node }),
        }
        let child = self.push(node, TreeNode::Leaf(leaf.clone()));
        self.leaves.insert(leaf, child);
        if let TreeNode::Single { branches, .. } = &mut self.nodes[node] {
            branches.insert(value, child);
        }
        Ok(())
    }

    /// Checks that every twin-test node lies on the root-to-`μ` path and
    /// that nothing else sits on it.
    pub fn twin_path_holds(&self) -> bool {
        let mut on_path = vec![false; self.nodes.len()];
        if let Some(mu) = self.mu {
            let mut at = Some(mu);
            while let Some(id) = at {
                on_path[id] = true;
                at = self.parent[id];
            }
        }
        self.nodes.iter().enumerate().all(|(id, node)| match node {
            TreeNode::Twin { .. } => on_path[id],
            TreeNode::Mu => Some(id) == self.mu,
            _ => !on_path[id],
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph t{} {{\n", self.level);
        for (id, node) in self.nodes.iter().enumerate() {
            let (shape, label) = match node {
                TreeNode::Twin { test, .. } => ("doubleoctagon", test.display_id()),
                TreeNode::Single { test, .. } => ("octagon", test.display_id()),
                TreeNode::Leaf(v) => ("box", v.display_id()),
                TreeNode::Mu => ("box", "μ".to_string()),
            };
            writeln!(out, "  t{id} [shape={shape},label=\"{label}\"];").unwrap();
            match node {
                TreeNode::Twin { pair, matched, unmatched, .. } => {
                    writeln!(out, "  t{id} -> t{matched} [label=\"({},{})\"];", pair.0, pair.1).unwrap();
                    writeln!(out, "  t{id} -> t{unmatched};").unwrap();
                }
                TreeNode::Single { branches, .. } => {
                    for (value, child) in branches {
                        writeln!(out, "  t{id} -> t{child} [label=\"{value}\"];").unwrap();
                    }
                }
                _ => {}
            }
        }
        out.push_str("}\n");
        out
    }

    fn push(&mut self, parent: TreeNodeId, node: TreeNode) -> TreeNodeId {
        self.nodes.push(node);
        self.parent.push(Some(parent));
        self.nodes.len() - 1
    }

    fn install_single(
        &mut self,
        slot: TreeNodeId,
        test: BitString,
        branches: Vec<(Value, BitString)>,
    ) -> Result<(), TreeError> {
        let mut map = BTreeMap::new();
        for (value, leaf) in branches {
            if map.contains_key(&value) {
                return Err(TreeError::DuplicateValue { level: self.level, node: slot, value });
            }
            if self.leaves.contains_key(&leaf) {
                return Err(TreeError::DuplicateLeaf { level: self.level, leaf });
            }
            let child = self.push(slot, TreeNode::Leaf(leaf.clone()));
            self.leaves.insert(leaf, child);
            map.insert(value, child);
        }
        self.nodes[slot] = TreeNode::Single { test, branches: map };
        Ok(())
    }
}

fn query_flip(query: &mut BitString, at: usize) {
    let mut bits = std::mem::take(query).bits().to_vec();
    bits[at] ^= 1;
    *query = BitString::from_bits(bits);
}
