//! Pre-trained threshold trees and forests.
//!
//! ```text
//! forest trees=<t> classes=<C> features=<F>
//! tree <idx> root=<id>
//! split <id> feature=<f> threshold=<decimal> true=<id> false=<id>
//! leaf <id> class=<c>
//! ```
//!
//! Node ids are local to the tree whose `tree` line precedes them. A split
//! sends a sample to `true` when `value[feature] <= threshold`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagram::io::{fields, number};
use crate::diagram::ParseError;

use super::PipelineError;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, yes: usize, no: usize },
    Leaf { class: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

impl Tree {
    /// Node indices in preorder, `true` child before `false` child.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(ix) = stack.pop() {
            out.push(ix);
            if let TreeNode::Split { yes, no, .. } = self.nodes[ix] {
                stack.push(no);
                stack.push(yes);
            }
        }
        out
    }

    /// Walks the tree, asking `goes_true(node index)` at each split.
    pub fn walk(&self, mut goes_true: impl FnMut(usize) -> bool) -> u32 {
        let mut at = self.root;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { class } => return class,
                TreeNode::Split { yes, no, .. } => at = if goes_true(at) { yes } else { no },
            }
        }
    }

    /// Node count when all leaves of one class are merged into a single
    /// terminal.
    pub fn leaf_shared_size(&self) -> usize {
        let mut splits = 0;
        let mut classes = std::collections::BTreeSet::new();
        for ix in self.preorder() {
            match self.nodes[ix] {
                TreeNode::Split { .. } => splits += 1,
                TreeNode::Leaf { class } => {
                    classes.insert(class);
                }
            }
        }
        splits + classes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeClassifier {
    pub classes: u32,
    pub features: usize,
    pub trees: Vec<Tree>,
}

impl TreeClassifier {
    /// Validates ranges and that every tree is a tree rooted at `root`.
    pub fn new(classes: u32, features: usize, trees: Vec<Tree>) -> Result<Self, PipelineError> {
        let schema = |path: String, message: String| PipelineError::Schema { path, message };
        if trees.is_empty() {
            return Err(schema("forest".into(), "no trees".into()));
        }
        for (t, tree) in trees.iter().enumerate() {
            let n = tree.nodes.len();
            if tree.root >= n {
                return Err(schema(format!("tree {t}"), format!("root {} does not exist", tree.root)));
            }
            let mut parents = vec![0usize; n];
            for (ix, node) in tree.nodes.iter().enumerate() {
                match *node {
                    TreeNode::Leaf { class } if class >= classes => {
                        return Err(schema(
                            format!("tree {t}/node {ix}"),
                            format!("class {class} outside 0..{classes}"),
                        ))
                    }
                    TreeNode::Split { feature, threshold, yes, no } => {
                        if feature >= features {
                            return Err(schema(
                                format!("tree {t}/node {ix}"),
                                format!("feature {feature} outside 0..{features}"),
                            ));
                        }
                        if !threshold.is_finite() {
                            return Err(schema(
                                format!("tree {t}/node {ix}"),
                                "threshold must be finite".into(),
                            ));
                        }
                        for child in [yes, no] {
                            if child >= n {
                                return Err(schema(
                                    format!("tree {t}/node {ix}"),
                                    format!("child {child} does not exist"),
                                ));
                            }
                            parents[child] += 1;
                        }
                    }
                    TreeNode::Leaf { .. } => {}
                }
            }
            if parents[tree.root] != 0 {
                return Err(schema(format!("tree {t}"), "the root has a parent".into()));
            }
            if let Some(ix) = (0..n).find(|&ix| ix != tree.root && parents[ix] != 1) {
                return Err(schema(
                    format!("tree {t}/node {ix}"),
                    format!("node has {} parents, expected one", parents[ix]),
                ));
            }
            // one parent each and a parentless root: cycles would leave
            // nodes unreachable
            if tree.preorder_checked().len() != n {
                return Err(schema(format!("tree {t}"), "unreachable nodes or a cycle".into()));
            }
        }
        Ok(TreeClassifier { classes, features, trees })
    }

    /// Majority vote over the trees; ties go to the smallest class.
    pub fn vote(&self, mut tree_class: impl FnMut(usize, &Tree) -> u32) -> u32 {
        let mut votes = vec![0usize; self.classes as usize];
        for (t, tree) in self.trees.iter().enumerate() {
            votes[tree_class(t, tree) as usize] += 1;
        }
        let best = *votes.iter().max().expect("at least one class");
        votes.iter().position(|&v| v == best).expect("maximum exists") as u32
    }

    pub fn predict(&self, x: &[f64]) -> Result<u32, PipelineError> {
        if x.len() != self.features {
            return Err(PipelineError::Arity { expected: self.features, got: x.len() });
        }
        Ok(self.vote(|_, tree| {
            tree.walk(|ix| match tree.nodes[ix] {
                TreeNode::Split { feature, threshold, .. } => x[feature] <= threshold,
                TreeNode::Leaf { .. } => unreachable!(),
            })
        }))
    }

    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut header: Option<(usize, u32, usize)> = None;
        // per tree: (declared index, root id, nodes keyed by document id)
        let mut trees: Vec<(usize, u64, Vec<(u64, usize, RawNode)>)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "forest" => {
                    if header.is_some() {
                        return Err(ParseError::new(line_no, "duplicate header").into());
                    }
                    let f = fields(line_no, &parts[1..], &["trees", "classes", "features"])?;
                    header = Some((
                        number(line_no, "tree count", f[0])?,
                        number(line_no, "class count", f[1])?,
                        number(line_no, "feature count", f[2])?,
                    ));
                }
                _ if header.is_none() => {
                    return Err(ParseError::new(line_no, "record before the `forest` header").into())
                }
                "tree" => {
                    let index = parts
                        .get(1)
                        .ok_or_else(|| ParseError::new(line_no, "missing tree index"))
                        .and_then(|s| number(line_no, "tree index", s))?;
                    let f = fields(line_no, &parts[2..], &["root"])?;
                    trees.push((index, number(line_no, "node id", f[0])?, Vec::new()));
                }
                kind @ ("split" | "leaf") => {
                    let Some(tree) = trees.last_mut() else {
                        return Err(ParseError::new(line_no, "node before any `tree` line").into());
                    };
                    let id: u64 = parts
                        .get(1)
                        .ok_or_else(|| ParseError::new(line_no, "missing node id"))
                        .and_then(|s| number(line_no, "node id", s))?;
                    let node = if kind == "split" {
                        let f = fields(line_no, &parts[2..], &["feature", "threshold", "true", "false"])?;
                        RawNode::Split {
                            feature: number(line_no, "feature", f[0])?,
                            threshold: number(line_no, "threshold", f[1])?,
                            yes: number(line_no, "node id", f[2])?,
                            no: number(line_no, "node id", f[3])?,
                        }
                    } else {
                        let f = fields(line_no, &parts[2..], &["class"])?;
                        RawNode::Leaf(number(line_no, "class", f[0])?)
                    };
                    tree.2.push((id, line_no, node));
                }
                other => return Err(ParseError::new(line_no, format!("unknown record `{other}`")).into()),
            }
        }
        let (count, classes, features) =
            header.ok_or_else(|| ParseError::new(1, "missing `forest` header"))?;
        if count != trees.len() {
            return Err(PipelineError::Schema {
                path: "forest".into(),
                message: format!("header declares {count} trees, found {}", trees.len()),
            });
        }
        let mut built = Vec::with_capacity(trees.len());
        for (pos, (index, root, raw)) in trees.into_iter().enumerate() {
            let path = format!("tree {index}");
            if index != pos {
                return Err(PipelineError::Schema {
                    path,
                    message: format!("trees must be numbered in order; expected {pos}"),
                });
            }
            let mut dense: HashMap<u64, usize> = HashMap::new();
            for (i, (id, line_no, _)) in raw.iter().enumerate() {
                if dense.insert(*id, i).is_some() {
                    return Err(ParseError::new(*line_no, format!("duplicate node id {id}")).into());
                }
            }
            let resolve = |id: u64| {
                dense.get(&id).copied().ok_or_else(|| PipelineError::Schema {
                    path: path.clone(),
                    message: format!("unknown node id {id}"),
                })
            };
            let mut nodes = Vec::with_capacity(raw.len());
            for (_, _, node) in &raw {
                nodes.push(match *node {
                    RawNode::Split { feature, threshold, yes, no } => {
                        TreeNode::Split { feature, threshold, yes: resolve(yes)?, no: resolve(no)? }
                    }
                    RawNode::Leaf(class) => TreeNode::Leaf { class },
                });
            }
            built.push(Tree { nodes, root: resolve(root)? });
        }
        TreeClassifier::new(classes, features, built)
    }

    pub fn to_document(&self) -> String {
        let mut out = format!(
            "forest trees={} classes={} features={}\n",
            self.trees.len(),
            self.classes,
            self.features
        );
        for (t, tree) in self.trees.iter().enumerate() {
            writeln!(out, "tree {t} root={}", tree.root).unwrap();
            for (ix, node) in tree.nodes.iter().enumerate() {
                match node {
                    TreeNode::Split { feature, threshold, yes, no } => writeln!(
                        out,
                        "split {ix} feature={feature} threshold={threshold:?} true={yes} false={no}"
                    )
                    .unwrap(),
                    TreeNode::Leaf { class } => writeln!(out, "leaf {ix} class={class}").unwrap(),
                }
            }
        }
        out
    }
}

impl Tree {
    /// Preorder that stops at revisits, for validation.
    fn preorder_checked(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(ix) = stack.pop() {
            if std::mem::replace(&mut seen[ix], true) {
                continue;
            }
            out.push(ix);
            if let TreeNode::Split { yes, no, .. } = self.nodes[ix] {
                stack.push(no);
                stack.push(yes);
            }
        }
        out
    }
}

enum RawNode {
    Split { feature: usize, threshold: f64, yes: u64, no: u64 },
    Leaf(u32),
}
