//! Line-oriented text documents and Graphviz output.
//!
//! ```text
//! omtbdd m=<int> k=<int> root=<id>
//! node <id> var=<i> lo=<id> hi=<id>
//! sink <id> value=<int>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{DiagramError, Node, Omtbdd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

/// Splits `key=value` fields of one line, checking the expected keys in order.
pub(crate) fn fields<'a>(
    line_no: usize,
    parts: &[&'a str],
    keys: &[&str],
) -> Result<Vec<&'a str>, ParseError> {
    if parts.len() != keys.len() {
        return Err(ParseError::new(
            line_no,
            format!("expected {} fields ({}), found {}", keys.len(), keys.join(", "), parts.len()),
        ));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(part, key)| match part.split_once('=') {
            Some((k, v)) if k == *key => Ok(v),
            _ => Err(ParseError::new(line_no, format!("expected `{key}=...`, found `{part}`"))),
        })
        .collect()
}

pub(crate) fn number<T: std::str::FromStr>(line_no: usize, what: &str, s: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError::new(line_no, format!("invalid {what} `{s}`")))
}

impl Omtbdd {
    pub fn to_document(&self) -> String {
        let mut out = format!("omtbdd m={} k={} root={}\n", self.m, self.k, self.root);
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Branch { var, lo, hi } => writeln!(out, "node {id} var={var} lo={lo} hi={hi}").unwrap(),
                Node::Sink { value } => writeln!(out, "sink {id} value={value}").unwrap(),
            }
        }
        out
    }

    /// Parses a document. Node ids are arbitrary non-negative integers and
    /// are renumbered densely in order of appearance.
    pub fn from_document(text: &str) -> Result<Omtbdd, DiagramError> {
        let mut header: Option<(usize, u32, u64, usize)> = None;
        // (id, line, raw node with document ids)
        let mut raw: Vec<(u64, usize, RawNode)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "omtbdd" => {
                    if header.is_some() {
                        return Err(ParseError::new(line_no, "duplicate header").into());
                    }
                    let f = fields(line_no, &parts[1..], &["m", "k", "root"])?;
                    header = Some((
                        number(line_no, "m", f[0])?,
                        number(line_no, "k", f[1])?,
                        number(line_no, "root", f[2])?,
                        line_no,
                    ));
                }
                "node" | "sink" if header.is_none() => {
                    return Err(ParseError::new(line_no, "node before the `omtbdd` header").into());
                }
                "node" => {
                    let id = node_id(line_no, &parts)?;
                    let f = fields(line_no, &parts[2..], &["var", "lo", "hi"])?;
                    raw.push((
                        id,
                        line_no,
                        RawNode::Branch {
                            var: number(line_no, "variable", f[0])?,
                            lo: number(line_no, "node id", f[1])?,
                            hi: number(line_no, "node id", f[2])?,
                        },
                    ));
                }
                "sink" => {
                    let id = node_id(line_no, &parts)?;
                    let f = fields(line_no, &parts[2..], &["value"])?;
                    raw.push((id, line_no, RawNode::Sink(number(line_no, "value", f[0])?)));
                }
                other => return Err(ParseError::new(line_no, format!("unknown record `{other}`")).into()),
            }
        }
        let (m, k, root, header_line) =
            header.ok_or_else(|| ParseError::new(1, "missing `omtbdd` header"))?;

        let mut dense: HashMap<u64, usize> = HashMap::new();
        for (i, (id, line_no, _)) in raw.iter().enumerate() {
            if dense.insert(*id, i).is_some() {
                return Err(ParseError::new(*line_no, format!("duplicate node id {id}")).into());
            }
        }
        let lookup = |id: u64, line_no: usize| {
            dense.get(&id).copied().ok_or_else(|| ParseError::new(line_no, format!("unknown node id {id}")))
        };
        let mut nodes = Vec::with_capacity(raw.len());
        for (_, line_no, node) in &raw {
            nodes.push(match *node {
                RawNode::Branch { var, lo, hi } => {
                    Node::Branch { var, lo: lookup(lo, *line_no)?, hi: lookup(hi, *line_no)? }
                }
                RawNode::Sink(value) => Node::Sink { value },
            });
        }
        let root = lookup(root, header_line)?;
        Omtbdd::new(m, k, nodes, root)
    }

    /// Graphviz digraph: sinks are boxes labeled by value, branch nodes are
    /// circles labeled by variable, 0-edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph omtbdd {\n");
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Branch { var, .. } => {
                    writeln!(out, "  n{id} [shape=circle,label=\"x{var}\"];").unwrap()
                }
                Node::Sink { value } => writeln!(out, "  n{id} [shape=box,label=\"{value}\"];").unwrap(),
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Branch { lo, hi, .. } = node {
                writeln!(out, "  n{id} -> n{lo} [style=dashed,label=\"0\"];").unwrap();
                writeln!(out, "  n{id} -> n{hi} [label=\"1\"];").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

enum RawNode {
    Branch { var: usize, lo: u64, hi: u64 },
    Sink(u32),
}

fn node_id(line_no: usize, parts: &[&str]) -> Result<u64, ParseError> {
    let s = parts.get(1).ok_or_else(|| ParseError::new(line_no, "missing node id"))?;
    number(line_no, "node id", s)
}
