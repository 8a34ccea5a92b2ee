//! Pairwise binary Ising models in 0/1 coding.
//!
//! The unnormalised log weight of a configuration `x` is
//! `Σ_s θ_s x_s + Σ_(s,t)∈E θ_st x_s x_t`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{CliqueSet, Graph, NodeId};

/// A binary vector `x ∈ {0,1}^n`, node 0 in the lowest bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    len: usize,
    words: Vec<u64>,
}

impl Configuration {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut x = Self::zeros(len);
        for i in 0..len {
            x.set(i, true);
        }
        x
    }

    /// Configuration whose bit pattern is `index` (requires `len <= 64`).
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64, "from_index needs len <= 64");
        let mut x = Self::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            x.words[0] = index & mask;
        }
        x
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => x.set(i, true),
                value => return Err(Error::NonBinaryValue { node: i, value }),
            }
        }
        Ok(x)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: NodeId) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: NodeId, on: bool) {
        assert!(i < self.len);
        if on {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Bit pattern as an integer, if it fits in one word.
    pub fn as_index(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

/// Graph plus node thresholds `θ_i` and edge weights `θ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    graph: Graph,
    thresholds: Vec<f64>,
    // aligned with `graph.edges()`
    weights: Vec<f64>,
    weighted_adj: Vec<Vec<(NodeId, f64)>>,
}

impl IsingModel {
    /// `weights[e]` belongs to `graph.edges()[e]`.
    pub fn new(graph: Graph, thresholds: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if thresholds.len() != graph.node_count() {
            return Err(Error::LengthMismatch { expected: graph.node_count(), found: thresholds.len() });
        }
        if weights.len() != graph.edge_count() {
            return Err(Error::LengthMismatch { expected: graph.edge_count(), found: weights.len() });
        }
        if !thresholds.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("threshold"));
        }
        if !weights.iter().all(|w| w.is_finite()) {
            return Err(Error::NonFinite("edge weight"));
        }
        let mut weighted_adj = vec![Vec::new(); graph.node_count()];
        for (&(i, j), &w) in graph.edges().iter().zip(&weights) {
            weighted_adj[i].push((j, w));
            weighted_adj[j].push((i, w));
        }
        for list in &mut weighted_adj {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(Self { graph, thresholds, weights, weighted_adj })
    }

    /// Builds a model from `(i, j, w)` triples. Repeating an edge with the
    /// same weight is accepted; repeating it with another weight is not.
    pub fn from_weighted_edges(n: usize, thresholds: Vec<f64>, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let pairs: Vec<_> = edges.iter().map(|&(i, j, _)| (i, j)).collect();
        let graph = Graph::new(n, &pairs)?;
        let mut weights = vec![None; graph.edge_count()];
        for &(i, j, w) in edges {
            let e = graph.edge_index(i, j).expect("edge was inserted");
            match weights[e] {
                Some(prev) if prev != w => return Err(Error::ConflictingWeight(i.min(j), i.max(j))),
                _ => weights[e] = Some(w),
            }
        }
        let weights = weights.into_iter().map(|w| w.expect("every edge has a weight")).collect();
        Self::new(graph, thresholds, weights)
    }

    /// Every threshold `theta0`, every edge weight `theta1`.
    pub fn homogeneous(graph: Graph, theta0: f64, theta1: f64) -> Result<Self> {
        let thresholds = vec![theta0; graph.node_count()];
        let weights = vec![theta1; graph.edge_count()];
        Self::new(graph, thresholds, weights)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn threshold(&self, i: NodeId) -> f64 {
        self.thresholds[i]
    }

    /// Edge weights aligned with `graph().edges()`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: NodeId, j: NodeId) -> Option<f64> {
        self.graph.edge_index(i, j).map(|e| self.weights[e])
    }

    /// Neighbours of `i` with the connecting weight, sorted by neighbour.
    pub fn weighted_neighbors(&self, i: NodeId) -> &[(NodeId, f64)] {
        &self.weighted_adj[i]
    }

    pub fn log_weight(&self, x: &Configuration) -> Result<f64> {
        if x.len() != self.node_count() {
            return Err(Error::LengthMismatch { expected: self.node_count(), found: x.len() });
        }
        let nodes: f64 = (0..self.node_count()).filter(|&i| x.get(i)).map(|i| self.thresholds[i]).sum();
        let pairs: f64 = self
            .graph
            .edges()
            .iter()
            .zip(&self.weights)
            .filter(|(&(i, j), _)| x.get(i) && x.get(j))
            .map(|(_, &w)| w)
            .sum();
        Ok(nodes + pairs)
    }

    /// Log weight of the configuration whose bits are `mask` (`n <= 64`).
    #[inline]
    pub fn log_weight_mask(&self, mask: u64) -> f64 {
        debug_assert!(self.node_count() <= 64);
        let mut total = 0.0;
        for (i, &t) in self.thresholds.iter().enumerate() {
            if mask >> i & 1 == 1 {
                total += t;
            }
        }
        for (&(i, j), &w) in self.graph.edges().iter().zip(&self.weights) {
            if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                total += w;
            }
        }
        total
    }

    /// `exp(log_weight(x)) / z`.
    pub fn probability(&self, x: &Configuration, z: f64) -> Result<f64> {
        if z.is_nan() || z <= 0.0 || z.is_infinite() {
            return Err(Error::NonPositivePartition);
        }
        self.probability_log(x, libm::log(z))
    }

    /// Same as [`IsingModel::probability`] with the normaliser given as `log Z`.
    pub fn probability_log(&self, x: &Configuration, log_z: f64) -> Result<f64> {
        if !log_z.is_finite() {
            return Err(Error::NonPositivePartition);
        }
        Ok(libm::exp(self.log_weight(x)? - log_z))
    }

    /// Sub-model on `keep`, relabelled to `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[NodeId]) -> Result<Self> {
        let graph = self.graph.induced(keep)?;
        let thresholds = keep.iter().map(|&v| self.thresholds[v]).collect();
        let weights =
            graph.edges().iter().map(|&(a, b)| self.weight(keep[a], keep[b]).expect("induced edge exists")).collect();
        Self::new(graph, thresholds, weights)
    }

    /// Same model with node `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: perm.len() });
        }
        let mut thresholds = vec![0.0; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::NodeOutOfRange { node: p, n });
            }
            thresholds[p] = self.thresholds[i];
        }
        let edges: Vec<_> =
            self.graph.edges().iter().zip(&self.weights).map(|(&(i, j), &w)| (perm[i], perm[j], w)).collect();
        Self::from_weighted_edges(n, thresholds, &edges)
    }
}

/// Attribution of node and edge potentials to maximal cliques.
///
/// Each node's threshold and each edge's weight is owned by the first
/// (lexicographically smallest) maximal clique that contains it, so the
/// per-clique log potentials sum to the model's log weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliquePotentialAssignment {
    cliques: CliqueSet,
    node_owner: Vec<usize>,
    edge_owner: Vec<usize>,
}

impl CliquePotentialAssignment {
    pub fn new(graph: &Graph) -> Self {
        Self::from_cliques(graph, graph.maximal_cliques())
    }

    pub fn from_cliques(graph: &Graph, cliques: CliqueSet) -> Self {
        let mut node_owner = vec![usize::MAX; graph.node_count()];
        let mut edge_owner = vec![usize::MAX; graph.edge_count()];
        for (c, clique) in cliques.iter().enumerate() {
            for (a, &i) in clique.iter().enumerate() {
                if node_owner[i] == usize::MAX {
                    node_owner[i] = c;
                }
                for &j in &clique[a + 1..] {
                    if let Some(e) = graph.edge_index(i, j) {
                        if edge_owner[e] == usize::MAX {
                            edge_owner[e] = c;
                        }
                    }
                }
            }
        }
        debug_assert!(node_owner.iter().all(|&c| c != usize::MAX));
        Self { cliques, node_owner, edge_owner }
    }

    pub fn cliques(&self) -> &CliqueSet {
        &self.cliques
    }

    pub fn node_owner(&self, node: NodeId) -> usize {
        self.node_owner[node]
    }

    pub fn edge_owner(&self, edge: usize) -> usize {
        self.edge_owner[edge]
    }

    pub fn owns_node(&self, clique: usize, node: NodeId) -> bool {
        self.node_owner[node] == clique
    }

    pub(crate) fn owned_weight(&self, m: &IsingModel, clique: usize, i: NodeId, j: NodeId) -> f64 {
        match m.graph().edge_index(i, j) {
            Some(e) if self.edge_owner[e] == clique => m.weights()[e],
            _ => 0.0,
        }
    }

    /// `log ψ_C` for clique `clique` with its nodes taking `value(node)`.
    pub(crate) fn clique_log_weight_with(&self, m: &IsingModel, clique: usize, value: impl Fn(NodeId) -> bool) -> f64 {
        let nodes = &self.cliques[clique];
        let mut total = 0.0;
        for (a, &i) in nodes.iter().enumerate() {
            if !value(i) {
                continue;
            }
            if self.owns_node(clique, i) {
                total += m.threshold(i);
            }
            for &j in &nodes[a + 1..] {
                if value(j) {
                    total += self.owned_weight(m, clique, i, j);
                }
            }
        }
        total
    }
}

/// `log ψ_C(x_C)`: owned thresholds plus owned intra-clique edge terms.
///
/// `x_clique[a]` is the value of the `a`-th node of the clique (cliques are
/// sorted ascending).
pub fn clique_log_weight(
    m: &IsingModel,
    assignment: &CliquePotentialAssignment,
    clique: usize,
    x_clique: &[u8],
) -> Result<f64> {
    let nodes = &assignment.cliques()[clique];
    if x_clique.len() < nodes.len() {
        return Err(Error::MissingCliqueNode(nodes[x_clique.len()]));
    }
    if x_clique.len() > nodes.len() {
        return Err(Error::LengthMismatch { expected: nodes.len(), found: x_clique.len() });
    }
    for (&node, &value) in nodes.iter().zip(x_clique) {
        if value > 1 {
            return Err(Error::NonBinaryValue { node, value });
        }
    }
    Ok(assignment.clique_log_weight_with(m, clique, |node| {
        let pos = nodes.binary_search(&node).expect("node of clique");
        x_clique[pos] == 1
    }))
}
