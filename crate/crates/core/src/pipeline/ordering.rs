//! Variable order from ancestor relations between conditions.

use std::collections::BTreeSet;

use super::{position, Condition, TreeClassifier, TreeNode};

/// `counts[i][j]`: number of (split on `conds[i]`, split on `conds[j]`)
/// node pairs where the first is a proper ancestor of the second.
pub fn ancestor_counts(c: &TreeClassifier, conds: &[Condition]) -> Vec<Vec<u64>> {
    let n = conds.len();
    let mut counts = vec![vec![0u64; n]; n];
    for tree in &c.trees {
        // (node, conditions of the splits above it)
        let mut stack = vec![(tree.root, Vec::<usize>::new())];
        while let Some((ix, above)) = stack.pop() {
            if let TreeNode::Split { feature, threshold, yes, no } = tree.nodes[ix] {
                let Some(me) = position(conds, Condition { feature, threshold }) else {
                    continue;
                };
                for &a in &above {
                    counts[a][me] += 1;
                }
                let mut below = above;
                below.push(me);
                stack.push((no, below.clone()));
                stack.push((yes, below));
            }
        }
    }
    counts
}

/// Orders `conds` so that conditions tending to sit higher in the trees
/// come first.
pub fn order_variables(c: &TreeClassifier, conds: &[Condition]) -> Vec<Condition> {
    order_from_counts(&ancestor_counts(c, conds)).into_iter().map(|i| conds[i]).collect()
}

/// Each pair `i < j` with unequal counts gets an edge towards the less
/// frequent ancestor, weighted by the difference. The lightest edges are
/// dropped (ties by pair order) until the rest is acyclic, and the result
/// is sorted topologically, ties by index.
pub fn order_from_counts(counts: &[Vec<u64>]) -> Vec<usize> {
    let n = counts.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (counts[i][j], counts[j][i]);
            if a > b {
                edges.push((a - b, i, j));
            } else if b > a {
                edges.push((b - a, j, i));
            }
        }
    }
    // stable: equal weights keep pair order
    edges.sort_by_key(|&(w, _, _)| w);

    // dropping more edges never creates a cycle, so search the shortest
    // prefix whose removal leaves a DAG
    let (mut lo, mut hi) = (0, edges.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if topological(n, &edges[mid..]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    topological(n, &edges[lo..]).expect("the empty graph is acyclic")
}

fn topological(n: usize, edges: &[(u64, usize, usize)]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(_, s, t) in edges {
        indegree[t] += 1;
        out[s].push(t);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &t in &out[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.insert(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{extract_conditions, Tree};

    fn split(feature: usize, yes: usize, no: usize) -> TreeNode {
        TreeNode::Split { feature, threshold: 0.0, yes, no }
    }

    fn leaf(class: u32) -> TreeNode {
        TreeNode::Leaf { class }
    }

    #[test]
    fn chain_keeps_depth_order() {
        // feature 2 above 0 above 1
        let t = Tree {
            nodes: vec![split(2, 1, 2), leaf(0), split(0, 3, 4), leaf(1), split(1, 5, 6), leaf(0), leaf(1)],
            root: 0,
        };
        let c = TreeClassifier::new(2, 3, vec![t]).unwrap();
        let conds = extract_conditions(&c);
        let order: Vec<usize> = order_variables(&c, &conds).iter().map(|c| c.feature).collect();
        assert_eq!(order, vec![2, 0, 1]);
    }

    #[test]
    fn opposite_nesting_uses_counts() {
        // tree 0: b above a. trees 1..=3: a above b
        let b_over_a =
            Tree { nodes: vec![split(1, 1, 2), leaf(0), split(0, 3, 4), leaf(0), leaf(1)], root: 0 };
        let a_over_b =
            Tree { nodes: vec![split(0, 1, 2), leaf(0), split(1, 3, 4), leaf(0), leaf(1)], root: 0 };
        let c =
            TreeClassifier::new(2, 2, vec![b_over_a, a_over_b.clone(), a_over_b.clone(), a_over_b]).unwrap();
        let conds = extract_conditions(&c);
        assert_eq!(conds[0].feature, 1);
        let counts = ancestor_counts(&c, &conds);
        assert_eq!((counts[0][1], counts[1][0]), (1, 3));
        let order: Vec<usize> = order_variables(&c, &conds).iter().map(|c| c.feature).collect();
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn lightest_edge_of_a_cycle_goes() {
        // a->b weight 1, b->c weight 2, c->a weight 3
        let counts = vec![vec![0, 1, 0], vec![0, 0, 2], vec![3, 0, 0]];
        assert_eq!(order_from_counts(&counts), vec![1, 2, 0]);
    }

    #[test]
    fn equal_counts_leave_index_order() {
        let counts = vec![vec![0, 2, 0], vec![2, 0, 0], vec![0, 0, 0]];
        assert_eq!(order_from_counts(&counts), vec![0, 1, 2]);
    }
}
