//! Digraph of pairs and the column-primitivity decision.
//!
//! Nodes are unordered pairs of states with repetition, `{i, j}` with
//! `i ≤ j`. There is an edge `{i₁,i₂} → {j₁,j₂}` labelled `k` when
//! `(A_k)_{i₁j₁} > 0` and `(A_k)_{i₂j₂} > 0` for some assignment of the
//! targets. A set is column-primitive iff every strict pair reaches a
//! singleton `{i,i}`.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::matset::{MatrixSet, Word, ZeroPattern};

/// Unordered pair of states, canonicalized with `lo ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PairNode {
    pub lo: usize,
    pub hi: usize,
}

impl PairNode {
    pub fn new(a: usize, b: usize) -> Self {
        PairNode {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }
}

/// 1-based, `"i"` for singletons and `"i,j"` otherwise.
impl fmt::Display for PairNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            write!(f, "{}", self.lo + 1)
        } else {
            write!(f, "{},{}", self.lo + 1, self.hi + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairEdge {
    pub src: usize,
    pub dst: usize,
    pub letter: usize,
}

#[derive(Debug, Clone)]
pub struct PairDigraph {
    n: usize,
    letters: usize,
    nodes: Vec<PairNode>,
    index: Vec<usize>,
    /// Sorted by `(src, dst, letter)`, no duplicates.
    edges: Vec<PairEdge>,
    out_start: Vec<usize>,
    /// Edge ids grouped by destination.
    in_edges: Vec<usize>,
    in_start: Vec<usize>,
}

impl PairDigraph {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn letter_count(&self) -> usize {
        self.letters
    }

    /// Nodes in lexicographic `(lo, hi)` order.
    pub fn nodes(&self) -> &[PairNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[PairEdge] {
        &self.edges
    }

    pub fn node_index(&self, pair: PairNode) -> usize {
        self.index[pair.lo * self.n + pair.hi]
    }

    pub fn node(&self, id: usize) -> PairNode {
        self.nodes[id]
    }

    pub fn out_edges(&self, id: usize) -> &[PairEdge] {
        &self.edges[self.out_start[id]..self.out_start[id + 1]]
    }

    pub fn in_edges(&self, id: usize) -> impl Iterator<Item = &PairEdge> {
        self.in_edges[self.in_start[id]..self.in_start[id + 1]]
            .iter()
            .map(|&e| &self.edges[e])
    }

    pub fn has_edge(&self, src: PairNode, dst: PairNode, letter: usize) -> bool {
        let (s, d) = (self.node_index(src), self.node_index(dst));
        self.out_edges(s)
            .binary_search(&PairEdge {
                src: s,
                dst: d,
                letter,
            })
            .is_ok()
    }

    /// Graphviz source. Node and edge order is fixed so output is stable.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph pairs {\n");
        for node in &self.nodes {
            let shape = if node.is_singleton() {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(s, "  \"{node}\" [shape={shape}];");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.nodes[e.src],
                self.nodes[e.dst],
                e.letter + 1
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Builds the digraph of pairs in `O(m·n⁴)` edge tests.
pub fn build_pair_digraph(set: &MatrixSet) -> PairDigraph {
    let n = set.dim();
    let mut nodes = Vec::with_capacity(n * (n + 1) / 2);
    let mut index = vec![usize::MAX; n * n];
    for lo in 0..n {
        for hi in lo..n {
            index[lo * n + hi] = nodes.len();
            index[hi * n + lo] = nodes.len();
            nodes.push(PairNode { lo, hi });
        }
    }

    let successors: Vec<Vec<Vec<usize>>> = set
        .patterns()
        .iter()
        .map(|p| (0..n).map(|i| p.successors(i).collect()).collect())
        .collect();

    let mut edges = Vec::new();
    for (letter, succ) in successors.iter().enumerate() {
        for (src, pair) in nodes.iter().enumerate() {
            for &j1 in &succ[pair.lo] {
                for &j2 in &succ[pair.hi] {
                    edges.push(PairEdge {
                        src,
                        dst: index[j1 * n + j2],
                        letter,
                    });
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();

    let count = nodes.len();
    let mut out_start = vec![0; count + 1];
    let mut in_start = vec![0; count + 1];
    for e in &edges {
        out_start[e.src + 1] += 1;
        in_start[e.dst + 1] += 1;
    }
    for v in 0..count {
        out_start[v + 1] += out_start[v];
        in_start[v + 1] += in_start[v];
    }
    let mut fill = in_start.clone();
    let mut in_edges = vec![0; edges.len()];
    for (id, e) in edges.iter().enumerate() {
        in_edges[fill[e.dst]] = id;
        fill[e.dst] += 1;
    }

    PairDigraph {
        n,
        letters: set.len(),
        nodes,
        index,
        edges,
        out_start,
        in_edges,
        in_start,
    }
}

/// One step of a merging path: apply `letter`, land on `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeStep {
    pub letter: usize,
    pub to: PairNode,
}

/// Outcome of the reachability sweep.
///
/// For each node that can reach a singleton it stores the distance and the
/// next hop of one shortest merging path (smallest letter, then smallest
/// target among optimal hops).
#[derive(Debug, Clone)]
pub struct Decision {
    nodes: Vec<PairNode>,
    dist: Vec<Option<usize>>,
    next: Vec<Option<(usize, usize)>>,
}

impl Decision {
    pub fn is_column_primitive(&self) -> bool {
        self.dist.iter().all(Option::is_some)
    }

    /// Strict pairs from which no singleton is reachable.
    pub fn blocking_pairs(&self) -> Vec<PairNode> {
        self.nodes
            .iter()
            .zip(&self.dist)
            .filter(|(_, d)| d.is_none())
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn distance(&self, g: &PairDigraph, pair: PairNode) -> Option<usize> {
        self.dist[g.node_index(pair)]
    }

    /// Shortest letter path from `pair` to a singleton.
    pub fn merging_path(&self, g: &PairDigraph, pair: PairNode) -> Option<Vec<MergeStep>> {
        let mut v = g.node_index(pair);
        self.dist[v]?;
        let mut steps = Vec::new();
        while let Some((letter, to)) = self.next[v] {
            steps.push(MergeStep {
                letter,
                to: self.nodes[to],
            });
            v = to;
        }
        Some(steps)
    }

    /// Letters of [`Self::merging_path`] as a word. Path order is written
    /// order: the first edge taken is the leftmost factor.
    pub fn merging_word(&self, g: &PairDigraph, pair: PairNode) -> Option<Word> {
        self.merging_path(g, pair)
            .map(|p| Word::new(p.iter().map(|s| s.letter).collect()))
    }

    pub fn max_merge_distance(&self) -> Option<usize> {
        self.dist
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .max()
    }
}

/// Multi-source BFS from every singleton over reversed edges.
/// `O(|V| + |E|)`.
pub fn decide_column_primitive(g: &PairDigraph) -> Decision {
    let count = g.node_count();
    let mut dist = vec![None; count];
    let mut queue = VecDeque::new();
    for (id, node) in g.nodes().iter().enumerate() {
        if node.is_singleton() {
            dist[id] = Some(0);
            queue.push_back(id);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for e in g.in_edges(v) {
            if dist[e.src].is_none() {
                dist[e.src] = Some(d + 1);
                queue.push_back(e.src);
            }
        }
    }

    let next = (0..count)
        .map(|v| match dist[v] {
            Some(d) if d > 0 => g
                .out_edges(v)
                .iter()
                .filter(|e| dist[e.dst] == Some(d - 1))
                .map(|e| (e.letter, e.dst))
                .min(),
            _ => None,
        })
        .collect();

    Decision {
        nodes: g.nodes().to_vec(),
        dist,
        next,
    }
}

/// Convenience: build and decide in one call.
pub fn is_column_primitive(set: &MatrixSet) -> bool {
    decide_column_primitive(&build_pair_digraph(set)).is_column_primitive()
}

/// Union of the letters' zero patterns: the singleton layer of the
/// digraph of pairs.
pub fn union_pattern(set: &MatrixSet) -> ZeroPattern {
    let n = set.dim();
    let mut u = ZeroPattern::empty(n);
    for p in set.patterns() {
        for i in 0..n {
            for j in p.successors(i) {
                u.set(i, j);
            }
        }
    }
    u
}
