//! Undirected simple graphs, maximal cliques and node-removal components.
//!
//! Node ids are 0-based.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected simple graph over nodes `0..n`.
///
/// Edges are stored once as `(min, max)` pairs in ascending order; the
/// adjacency lists are sorted, so lookups in either direction agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a graph, silently dropping duplicate (or reversed) edges.
    pub fn new(n: usize, edge_list: &[(NodeId, NodeId)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Self::build(n, edge_list)
    }

    // Zero-node graphs are only produced internally, when every node of a
    // model is clamped.
    fn build(n: usize, edge_list: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(i, j) in edge_list {
            for node in [i, j] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            edges.push((i.min(j), i.max(j)));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, edges, adj })
    }

    /// A graph with `n` nodes and every pair connected.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::new(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node].len()
    }

    /// Position of the edge `{i, j}` in [`Graph::edges`].
    pub fn edge_index(&self, i: NodeId, j: NodeId) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        i != j && i < self.n && j < self.n && self.adj[i].binary_search(&j).is_ok()
    }

    pub fn is_clique(&self, nodes: &[NodeId]) -> bool {
        nodes.iter().enumerate().all(|(a, &i)| nodes[a + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    /// All maximal cliques, each sorted ascending and listed in
    /// lexicographic order. Isolated nodes show up as singletons.
    pub fn maximal_cliques(&self) -> CliqueSet {
        if self.n == 0 {
            return CliqueSet { cliques: Vec::new() };
        }
        let words = words_for(self.n);
        let neighbor_sets: Vec<NodeSet> =
            (0..self.n).map(|v| NodeSet::from_iter(words, self.adj[v].iter().copied())).collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        let candidates = NodeSet::full(words, self.n);
        let excluded = NodeSet::empty(words);
        expand(&neighbor_sets, &mut current, candidates, excluded, &mut out);
        for clique in &mut out {
            clique.sort_unstable();
        }
        out.sort();
        CliqueSet { cliques: out }
    }

    /// Connected components of the subgraph induced on the nodes not in
    /// `removed`. Each component is sorted and components are ordered by
    /// their smallest node.
    pub fn components_after_removal(&self, removed: &[NodeId]) -> Vec<Vec<NodeId>> {
        let mut gone = vec![false; self.n];
        for &r in removed {
            if r < self.n {
                gone[r] = true;
            }
        }
        let mut seen = gone.clone();
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn components(&self) -> Vec<Vec<NodeId>> {
        self.components_after_removal(&[])
    }

    /// Whether removing `nodes` leaves at least two components.
    pub fn is_cutset(&self, nodes: &[NodeId]) -> bool {
        self.components_after_removal(nodes).len() >= 2
    }

    /// Subgraph induced on `keep` (distinct ids), relabelled to
    /// `0..keep.len()` in the order given. `keep` may be empty.
    pub fn induced(&self, keep: &[NodeId]) -> Result<Graph> {
        let mut local = vec![usize::MAX; self.n];
        for (idx, &v) in keep.iter().enumerate() {
            local[v] = idx;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(i, j)| local[i] != usize::MAX && local[j] != usize::MAX)
            .map(|&(i, j)| (local[i], local[j]))
            .collect();
        Graph::build(keep.len(), &edges)
    }
}

/// Maximal cliques of a graph in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    cliques: Vec<Vec<NodeId>>,
}

impl CliqueSet {
    pub fn cliques(&self) -> &[Vec<NodeId>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Vec<NodeId>> {
        self.cliques.iter()
    }

    pub fn into_inner(self) -> Vec<Vec<NodeId>> {
        self.cliques
    }
}

impl core::ops::Index<usize> for CliqueSet {
    type Output = [NodeId];

    fn index(&self, idx: usize) -> &[NodeId] {
        &self.cliques[idx]
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Fixed-width bitset used by the clique search.
#[derive(Clone)]
struct NodeSet {
    bits: Vec<u64>,
}

impl NodeSet {
    fn empty(words: usize) -> Self {
        Self { bits: vec![0; words] }
    }

    fn full(words: usize, n: usize) -> Self {
        let mut s = Self::empty(words);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn from_iter(words: usize, nodes: impl Iterator<Item = NodeId>) -> Self {
        let mut s = Self::empty(words);
        for v in nodes {
            s.insert(v);
        }
        s
    }

    fn insert(&mut self, v: NodeId) {
        self.bits[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: NodeId) {
        self.bits[v / 64] &= !(1 << (v % 64));
    }

    fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn intersect(&self, other: &NodeSet) -> NodeSet {
        NodeSet { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect() }
    }

    fn intersect_count(&self, other: &NodeSet) -> u32 {
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn difference(&self, other: &NodeSet) -> NodeSet {
        NodeSet { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect() }
    }

    fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }
}

// Bron-Kerbosch with Tomita pivoting: the pivot maximises |P ∩ N(u)| over
// u ∈ P ∪ X, and only P \ N(pivot) is branched on.
fn expand(
    neighbors: &[NodeSet],
    current: &mut Vec<NodeId>,
    mut candidates: NodeSet,
    mut excluded: NodeSet,
    out: &mut Vec<Vec<NodeId>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .max_by_key(|&u| (candidates.intersect_count(&neighbors[u]), core::cmp::Reverse(u)))
        .expect("candidates is non-empty");
    let branch: Vec<NodeId> = candidates.difference(&neighbors[pivot]).iter().collect();
    for v in branch {
        current.push(v);
        expand(neighbors, current, candidates.intersect(&neighbors[v]), excluded.intersect(&neighbors[v]), out);
        current.pop();
        candidates.remove(v);
        excluded.insert(v);
    }
}
