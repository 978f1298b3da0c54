//! Parent-pointer forests over node indices `0..n`, and the two tree
//! constructions this crate is about: the classic Fenwick (binary indexed)
//! layout and the ternary Sierpinski layout.
//!
//! Both builders produce the full tree for the next power of the branching
//! base and then truncate it: every node with index `>= n` is deleted and
//! children of deleted nodes become roots. For non-power sizes the result is
//! a forest rather than a single tree.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("forest size must be at least 1")]
    EmptySize,
    #[error("node {node}: parent {parent} out of range for size {size}")]
    ParentOutOfRange {
        node: usize,
        parent: usize,
        size: usize,
    },
    #[error("node {node} is its own parent")]
    SelfLoop { node: usize },
    #[error("parent chain from node {node} forms a cycle")]
    Cycle { node: usize },
    #[error("node index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("node {node} is a root; it has no parent edge to delete")]
    NoEdge { node: usize },
    #[error("parent list has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid forest JSON: {0}")]
    Json(String),
}

/// An immutable forest on nodes `0..size`, described by parent pointers.
///
/// Children lists and roots are derived from the parent vector at
/// construction time; children are kept in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    interval_subtrees: bool,
}

impl Forest {
    /// Builds a forest from parent pointers, rejecting out-of-range parents,
    /// self-loops and cycles.
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self, ForestError> {
        validate_parents(&parents)?;
        let n = parents.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (child, parent) in parents.iter().enumerate() {
            match parent {
                Some(p) => children[*p].push(child),
                None => roots.push(child),
            }
        }
        let interval_subtrees = subtrees_are_intervals(&children, &roots, n);
        Ok(Forest {
            parents,
            children,
            roots,
            interval_subtrees,
        })
    }

    pub fn size(&self) -> usize {
        self.parents.len()
    }

    /// Parent of `j`, or `None` for roots. Panics if `j` is out of range.
    pub fn parent(&self, j: usize) -> Option<usize> {
        self.parents[j]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    /// Children of `j` in ascending index order. Panics if out of range.
    pub fn children(&self, j: usize) -> &[usize] {
        &self.children[j]
    }

    /// Root nodes in ascending index order.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// True when every subtree's node set is a contiguous index interval.
    ///
    /// Holds for freshly built (including truncated) Fenwick and Sierpinski
    /// forests; generally broken by `delete_edge`. Fast query paths rely on
    /// this property.
    pub fn subtrees_are_intervals(&self) -> bool {
        self.interval_subtrees
    }

    /// The chain `parent(j), parent(parent(j)), ...` up to a root,
    /// excluding `j` itself.
    pub fn ancestors(&self, j: usize) -> Result<Vec<usize>, ForestError> {
        self.check_index(j)?;
        let mut out = Vec::new();
        let mut x = j;
        while let Some(p) = self.parents[x] {
            out.push(p);
            x = p;
        }
        Ok(out)
    }

    /// `j` together with all of its descendants, as a sorted set.
    pub fn subtree_nodes(&self, j: usize) -> Result<NodeSet, ForestError> {
        self.check_index(j)?;
        let mut out = Vec::new();
        let mut stack = vec![j];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend_from_slice(&self.children[x]);
        }
        Ok(NodeSet::from_unsorted(out))
    }

    /// Returns a copy of the forest with the edge above `child` removed,
    /// turning `child` into a root. Errors if `child` is already a root.
    pub fn delete_edge(&self, child: usize) -> Result<Forest, ForestError> {
        self.check_index(child)?;
        if self.parents[child].is_none() {
            return Err(ForestError::NoEdge { node: child });
        }
        let mut parents = self.parents.clone();
        parents[child] = None;
        Ok(Forest::from_parents(parents).expect("removing an edge keeps the forest valid"))
    }

    /// Re-checks the structural invariants and reports the first violation.
    pub fn validate(&self) -> Result<(), ForestError> {
        validate_parents(&self.parents)
    }

    /// All edges as `(parent, child)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, kids) in self.children.iter().enumerate() {
            for &c in kids {
                out.push((p, c));
            }
        }
        out
    }

    /// Nodes in an order that lists every child before its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let n = self.size();
        let mut out = Vec::with_capacity(n);
        for &root in &self.roots {
            // (node, next child position)
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&mut (node, ref mut cursor)) = stack.last_mut() {
                if *cursor < self.children[node].len() {
                    let next = self.children[node][*cursor];
                    *cursor += 1;
                    stack.push((next, 0));
                } else {
                    out.push(node);
                    stack.pop();
                }
            }
        }
        out
    }

    /// Serializes to the canonical JSON form
    /// `{"n": <int>, "parents": [<int or null>, ...]}`.
    pub fn to_json(&self) -> String {
        let doc = ForestJson {
            n: self.size(),
            parents: self.parents.clone(),
        };
        serde_json::to_string(&doc).expect("forest JSON serialization cannot fail")
    }

    /// Parses the canonical JSON form and validates the structure.
    pub fn from_json(text: &str) -> Result<Self, ForestError> {
        let doc: ForestJson =
            serde_json::from_str(text).map_err(|e| ForestError::Json(e.to_string()))?;
        if doc.parents.len() != doc.n {
            return Err(ForestError::LengthMismatch {
                expected: doc.n,
                got: doc.parents.len(),
            });
        }
        Forest::from_parents(doc.parents)
    }

    /// Graphviz export: one `p -> c` line per edge, ascending order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph forest {\n");
        for j in 0..self.size() {
            let _ = writeln!(out, "  {j};");
        }
        for (p, c) in self.edges() {
            let _ = writeln!(out, "  {p} -> {c};");
        }
        out.push_str("}\n");
        out
    }

    fn check_index(&self, j: usize) -> Result<(), ForestError> {
        if j >= self.size() {
            return Err(ForestError::IndexOutOfRange {
                index: j,
                size: self.size(),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ForestJson {
    n: usize,
    parents: Vec<Option<usize>>,
}

/// Checks a raw parent vector: indices in range, no self-loops, no cycles.
pub fn validate_parents(parents: &[Option<usize>]) -> Result<(), ForestError> {
    let n = parents.len();
    if n == 0 {
        return Err(ForestError::EmptySize);
    }
    for (node, parent) in parents.iter().enumerate() {
        if let Some(p) = parent {
            if *p >= n {
                return Err(ForestError::ParentOutOfRange {
                    node,
                    parent: *p,
                    size: n,
                });
            }
            if *p == node {
                return Err(ForestError::SelfLoop { node });
            }
        }
    }
    // 0 = unvisited, 1 = on the current chain, 2 = known acyclic
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut chain = Vec::new();
        let mut x = start;
        loop {
            match state[x] {
                1 => return Err(ForestError::Cycle { node: x }),
                2 => break,
                _ => {}
            }
            state[x] = 1;
            chain.push(x);
            match parents[x] {
                Some(p) => x = p,
                None => break,
            }
        }
        for v in chain {
            state[v] = 2;
        }
    }
    Ok(())
}

/// Smallest power of 3 that is `>= n`.
pub fn next_power_of_3(n: usize) -> usize {
    let mut p = 1usize;
    while p < n {
        p = p.checked_mul(3).expect("forest size overflow");
    }
    p
}

/// `ceil(log3 n)` for `n >= 1`.
pub fn ceil_log3(n: usize) -> usize {
    let mut k = 0;
    let mut p = 1usize;
    while p < n {
        p = p.checked_mul(3).expect("forest size overflow");
        k += 1;
    }
    k
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    let mut k = 0;
    let mut p = 1usize;
    while p < n {
        p = p.checked_mul(2).expect("forest size overflow");
        k += 1;
    }
    k
}

/// Builds the ternary Sierpinski forest on `n` nodes.
///
/// The full tree on `3^k` nodes connects, at every recursion level, the
/// midpoint of the middle third to the midpoints of the flanking thirds
/// (the middle node is the parent). Other sizes are obtained by building
/// the next full tree and deleting all nodes with index `>= n`.
pub fn build_sierpinski(n: usize) -> Result<Forest, ForestError> {
    if n == 0 {
        return Err(ForestError::EmptySize);
    }
    let full = next_power_of_3(n);
    let mut parents = vec![None; full];
    sierpinski_segment(&mut parents, 0, full - 1);
    truncate_in_place(&mut parents, n);
    Forest::from_parents(parents)
}

fn sierpinski_segment(parents: &mut [Option<usize>], s: usize, e: usize) {
    if s == e {
        return;
    }
    let third = (e - s + 1) / 3;
    let left = s + (third - 1) / 2;
    let center = (s + e) / 2;
    let right = e - (left - s);
    parents[left] = Some(center);
    parents[right] = Some(center);
    let t = 2 * (left - s);
    sierpinski_segment(parents, s, s + t);
    sierpinski_segment(parents, s + t + 1, s + 2 * t + 1);
    sierpinski_segment(parents, s + 2 * t + 2, e);
}

/// Builds the Fenwick (binary indexed tree) forest on `n` nodes.
///
/// The full tree on `2^k` nodes makes the right endpoint of each interval
/// the parent of the interval's midpoint and recurses on both halves;
/// other sizes truncate the next full tree. Node `j` ends up covering the
/// interval of length `lowbit(j + 1)` ending at `j`, the classic layout.
pub fn build_fenwick(n: usize) -> Result<Forest, ForestError> {
    if n == 0 {
        return Err(ForestError::EmptySize);
    }
    let full = 1usize << ceil_log2(n);
    let mut parents = vec![None; full];
    fenwick_segment(&mut parents, 0, full - 1);
    truncate_in_place(&mut parents, n);
    Forest::from_parents(parents)
}

fn fenwick_segment(parents: &mut [Option<usize>], s: usize, e: usize) {
    if s == e {
        return;
    }
    let mid = (s + e) / 2;
    parents[mid] = Some(e);
    fenwick_segment(parents, s, mid);
    fenwick_segment(parents, mid + 1, e);
}

/// Deletes all nodes with index `>= n`; children of deleted nodes become
/// roots. The surviving parent entries are unchanged.
fn truncate_in_place(parents: &mut Vec<Option<usize>>, n: usize) {
    parents.truncate(n);
    for entry in parents.iter_mut() {
        if entry.is_some_and(|p| p >= n) {
            *entry = None;
        }
    }
}

fn subtrees_are_intervals(children: &[Vec<usize>], roots: &[usize], n: usize) -> bool {
    let mut lo: Vec<usize> = (0..n).collect();
    let mut hi = lo.clone();
    let mut size = vec![1usize; n];
    for &root in roots {
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (node, ref mut cursor)) = stack.last_mut() {
            if *cursor < children[node].len() {
                let next = children[node][*cursor];
                *cursor += 1;
                stack.push((next, 0));
            } else {
                for &c in &children[node] {
                    lo[node] = lo[node].min(lo[c]);
                    hi[node] = hi[node].max(hi[c]);
                    size[node] += size[c];
                }
                stack.pop();
            }
        }
    }
    (0..n).all(|j| hi[j] - lo[j] + 1 == size[j])
}
