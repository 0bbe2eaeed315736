use std::collections::HashMap;

use super::{Node, NodeId, Omtbdd};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Sink(u32),
    Branch(usize, usize, usize),
}

impl Omtbdd {
    /// Canonical reduced form.
    ///
    /// Equal-valued sinks merge, nodes with identical `(var, lo, hi)` merge
    /// and nodes whose two children coincide are bypassed. Nodes are then
    /// renumbered in depth-first preorder from the root (low child first),
    /// so two reductions of the same function compare equal field by field.
    pub fn reduce(&self) -> Omtbdd {
        let reachable = self.reachable();
        let mut order: Vec<NodeId> = reachable;
        // children always sit at a strictly larger level
        order.sort_by_key(|&id| std::cmp::Reverse(self.var_of(id)));

        let mut unique: HashMap<Key, usize> = HashMap::new();
        let mut merged: Vec<Node> = Vec::new();
        let mut rep: HashMap<NodeId, usize> = HashMap::with_capacity(order.len());
        for id in order {
            let key = match self.nodes[id] {
                Node::Sink { value } => Key::Sink(value),
                Node::Branch { var, lo, hi } => {
                    let (lo, hi) = (rep[&lo], rep[&hi]);
                    if lo == hi {
                        rep.insert(id, lo);
                        continue;
                    }
                    Key::Branch(var, lo, hi)
                }
            };
            let slot = *unique.entry(key).or_insert_with(|| {
                merged.push(match key {
                    Key::Sink(value) => Node::Sink { value },
                    Key::Branch(var, lo, hi) => Node::Branch { var, lo, hi },
                });
                merged.len() - 1
            });
            rep.insert(id, slot);
        }
        renumber(self.m, self.k, &merged, rep[&self.root])
    }

    /// Node ids reachable from the root, in discovery order.
    pub fn reachable(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                continue;
            }
            out.push(id);
            if let Node::Branch { lo, hi, .. } = self.nodes[id] {
                stack.push(hi);
                stack.push(lo);
            }
        }
        out
    }

    /// Whether the stored diagram is already in reduced form.
    pub fn is_reduced(&self) -> bool {
        self.reduce().node_count() == self.reachable().len()
    }
}

fn renumber(m: usize, k: u32, nodes: &[Node], root: usize) -> Omtbdd {
    let mut new_id = vec![usize::MAX; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if new_id[id] != usize::MAX {
            continue;
        }
        new_id[id] = order.len();
        order.push(id);
        if let Node::Branch { lo, hi, .. } = nodes[id] {
            stack.push(hi);
            stack.push(lo);
        }
    }
    let out = order
        .iter()
        .map(|&id| match nodes[id] {
            Node::Branch { var, lo, hi } => Node::Branch { var, lo: new_id[lo], hi: new_id[hi] },
            sink => sink,
        })
        .collect();
    Omtbdd { m, k, nodes: out, root: 0 }
}
