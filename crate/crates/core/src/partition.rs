//! Partition-function engines.
//!
//! Everything is computed as `log Z`. The exact engines enumerate
//! `{0,1}^n` and refuse models larger than an explicit cap; the
//! approximations are closed-form products or the Curie-Weiss magnetisation
//! sum.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::intervention::InterventionSpec;
use crate::ising::{CliquePotentialAssignment, IsingModel};
use crate::numeric::{ln_binomial, LogSumExp};

/// Default largest number of free nodes the exact engines will enumerate.
pub const DEFAULT_CAP: usize = 25;
/// Hard ceiling: enumeration indices are `u64`.
pub const MAX_CAP: usize = 63;

// Gray-code walks recompute the running log weight from scratch this often
// so that rounding drift stays bounded.
const RESYNC_INTERVAL: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Inner,
    Pairwise,
    CurieWeiss,
    CliqueProduct,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Inner => "inner",
            Method::Pairwise => "pairwise",
            Method::CurieWeiss => "curie_weiss",
            Method::CliqueProduct => "clique_product",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

/// `log Z` together with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionEstimate {
    pub log_value: f64,
    pub method: Method,
}

impl PartitionEstimate {
    pub fn new(log_value: f64, method: Method) -> Self {
        Self { log_value, method }
    }

    /// `Z` itself; may be `inf` where `log_value` is still finite.
    pub fn value(&self) -> f64 {
        libm::exp(self.log_value)
    }
}

fn check_cap(free: usize, cap: usize) -> Result<()> {
    if free > cap.min(MAX_CAP) {
        Err(Error::CapExceeded { free, cap: cap.min(MAX_CAP) })
    } else {
        Ok(())
    }
}

/// Visits configurations `gray(t)` for `t` in `start..end`, where
/// `gray(t) = t ^ (t >> 1)`, passing each bit mask and its log weight.
///
/// Consecutive Gray codes differ in one bit, so each step costs
/// `O(degree)` instead of `O(n + |E|)`.
pub fn gray_walk(m: &IsingModel, start: u64, end: u64, mut visit: impl FnMut(u64, f64)) {
    if start >= end {
        return;
    }
    let mut mask = start ^ (start >> 1);
    let mut energy = m.log_weight_mask(mask);
    visit(mask, energy);
    for t in start + 1..end {
        let bit = t.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if t % RESYNC_INTERVAL == 0 {
            energy = m.log_weight_mask(mask);
        } else {
            let mut field = m.threshold(bit);
            for &(j, w) in m.weighted_neighbors(bit) {
                if mask >> j & 1 == 1 {
                    field += w;
                }
            }
            if mask >> bit & 1 == 1 {
                energy += field;
            } else {
                energy -= field;
            }
        }
        visit(mask, energy);
    }
}

/// Log-sum-exp of the weights of Gray indices `start..end`. Blocks over a
/// partition of `0..2^n` can be reduced independently and merged.
pub fn exact_log_sum_block(m: &IsingModel, start: u64, end: u64) -> LogSumExp {
    let mut acc = LogSumExp::new();
    gray_walk(m, start, end, |_, lw| acc.push(lw));
    acc
}

/// Splits `0..2^n` into at most `blocks` contiguous index ranges.
pub fn enumeration_blocks(n: usize, blocks: usize) -> Vec<(u64, u64)> {
    assert!(n <= MAX_CAP);
    let total = 1u64 << n;
    let blocks = (blocks.max(1) as u64).min(total);
    let step = total.div_ceil(blocks);
    (0..blocks).map(|b| (b * step, ((b + 1) * step).min(total))).filter(|(s, e)| s < e).collect()
}

/// Exact `log Z` by enumerating all `2^n` configurations.
pub fn exact_partition(m: &IsingModel, cap: usize) -> Result<PartitionEstimate> {
    let n = m.node_count();
    check_cap(n, cap)?;
    let acc = exact_log_sum_block(m, 0, 1u64 << n);
    Ok(PartitionEstimate::new(acc.value(), Method::Exact))
}

/// `Π_i (1 + exp θ_i)`: interactions ignored.
pub fn inner_approximation(m: &IsingModel) -> PartitionEstimate {
    let log_value = m.thresholds().iter().map(|&t| softplus(t)).sum();
    PartitionEstimate::new(log_value, Method::Inner)
}

/// `Π_(i,j)∈E Z_ij` with `Z_ij = 1 + e^θi + e^θj + e^(θi+θj+θij)`.
///
/// Taken verbatim: node terms at shared endpoints are counted once per
/// incident edge, so this is exact only for disjoint edges.
pub fn pairwise_product(m: &IsingModel) -> PartitionEstimate {
    let log_value = m
        .graph()
        .edges()
        .iter()
        .zip(m.weights())
        .map(|(&(i, j), &w)| {
            let (ti, tj) = (m.threshold(i), m.threshold(j));
            crate::numeric::log_sum_exp(&[0.0, ti, tj, ti + tj + w])
        })
        .sum();
    PartitionEstimate::new(log_value, Method::Pairwise)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// Reduced parameters of a Curie-Weiss block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurieWeissParams {
    /// Number of free nodes.
    pub k: usize,
    /// Average neighbour count.
    pub nu: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl CurieWeissParams {
    /// A complete block of `k` nodes: `ν = k - 1`.
    pub fn clique(k: usize, theta0: f64, theta1: f64) -> Self {
        Self { k, nu: k.saturating_sub(1) as f64, theta0, theta1 }
    }
}

/// `Σ_r C(k,r) exp(θ0 r + ν θ1 r(r-1) / (2(k-1)))`, in O(k).
///
/// For `k <= 1` the pair term vanishes, so `Z = 1 + e^θ0` (k = 1) or
/// `Z = 1` (k = 0).
pub fn curie_weiss_partition(p: &CurieWeissParams) -> PartitionEstimate {
    let k = p.k;
    let pair_coef = if k <= 1 { 0.0 } else { p.nu * p.theta1 / (2.0 * (k - 1) as f64) };
    let acc: LogSumExp = (0..=k)
        .map(|r| {
            let rf = r as f64;
            ln_binomial(k, r) + p.theta0 * rf + pair_coef * rf * (rf - 1.0)
        })
        .collect();
    PartitionEstimate::new(acc.value(), Method::CurieWeiss)
}

/// Which edges enter the averaged interaction of a conditioned clique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaOneRule {
    /// Edges between free (unclamped) clique nodes.
    #[default]
    FreeEdges,
    /// Every edge of the clique, clamped endpoints included.
    AllCliqueEdges,
}

/// Curie-Weiss parameters of clique `clique` after clamping `iv`.
///
/// Each free node's threshold is its owned threshold plus the owned weights
/// to clamped neighbours in the clique that are set to 1; `θ0*` is their
/// average. `θ1*` averages owned edge weights over the pairs selected by
/// `rule`. A clique that is entirely clamped gives `k = 0`; its constant
/// factor comes from [`clamped_clique_log_constant`].
pub fn reduce_clique(
    m: &IsingModel,
    assignment: &CliquePotentialAssignment,
    clique: usize,
    iv: &InterventionSpec,
    rule: ThetaOneRule,
) -> CurieWeissParams {
    let nodes = &assignment.cliques()[clique];
    let free: Vec<NodeId> = nodes.iter().copied().filter(|&v| !iv.contains(v)).collect();
    let k = free.len();
    let theta0 = if k == 0 {
        0.0
    } else {
        let total: f64 = free
            .iter()
            .map(|&i| {
                let own = if assignment.owns_node(clique, i) { m.threshold(i) } else { 0.0 };
                let absorbed: f64 = nodes
                    .iter()
                    .filter(|&&j| iv.value(j) == Some(true))
                    .map(|&j| assignment.owned_weight(m, clique, i, j))
                    .sum();
                own + absorbed
            })
            .sum();
        total / k as f64
    };
    let pair_nodes: &[NodeId] = match rule {
        ThetaOneRule::FreeEdges => &free,
        ThetaOneRule::AllCliqueEdges => nodes,
    };
    let mut sum = 0.0;
    let mut count = 0usize;
    for (a, &i) in pair_nodes.iter().enumerate() {
        for &j in &pair_nodes[a + 1..] {
            sum += assignment.owned_weight(m, clique, i, j);
            count += 1;
        }
    }
    let theta1 = if count == 0 { 0.0 } else { sum / count as f64 };
    CurieWeissParams::clique(k, theta0, theta1)
}

/// Log of the clique potential's terms that involve clamped nodes only.
pub fn clamped_clique_log_constant(
    m: &IsingModel,
    assignment: &CliquePotentialAssignment,
    clique: usize,
    iv: &InterventionSpec,
) -> f64 {
    assignment.clique_log_weight_with(m, clique, |v| iv.value(v) == Some(true))
}

/// How each clique's conditional normaliser is computed in
/// [`clique_product_partition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerCliqueMethod {
    Exact,
    CurieWeiss,
}

/// One clique's factor in a clique-product normaliser.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueFactor {
    pub clique: Vec<NodeId>,
    pub free: Vec<NodeId>,
    /// Log of the conditional normaliser, clamped constant included.
    pub log_value: f64,
    /// The Curie-Weiss parameters used, if any.
    pub params: Option<CurieWeissParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueProduct {
    pub estimate: PartitionEstimate,
    pub factors: Vec<CliqueFactor>,
}

/// Product over maximal cliques of each clique's own conditional normaliser.
///
/// This treats cliques as independent even when they share free nodes, so it
/// matches the true conditional normaliser only when the free parts of the
/// cliques are disjoint.
pub fn clique_product_partition(
    m: &IsingModel,
    assignment: &CliquePotentialAssignment,
    iv: &InterventionSpec,
    method: PerCliqueMethod,
    rule: ThetaOneRule,
    cap: usize,
) -> Result<CliqueProduct> {
    iv.validate(m.node_count())?;
    let mut factors = Vec::with_capacity(assignment.cliques().len());
    let mut total = 0.0;
    for (c, nodes) in assignment.cliques().iter().enumerate() {
        let free: Vec<NodeId> = nodes.iter().copied().filter(|&v| !iv.contains(v)).collect();
        let (log_value, params) = match method {
            PerCliqueMethod::Exact => {
                check_cap(free.len(), cap)?;
                let mut acc = LogSumExp::new();
                for mask in 0..1u64 << free.len() {
                    acc.push(assignment.clique_log_weight_with(m, c, |v| match iv.value(v) {
                        Some(on) => on,
                        None => {
                            let pos = free.binary_search(&v).expect("free node");
                            mask >> pos & 1 == 1
                        }
                    }));
                }
                (acc.value(), None)
            }
            PerCliqueMethod::CurieWeiss => {
                let params = reduce_clique(m, assignment, c, iv, rule);
                let constant = clamped_clique_log_constant(m, assignment, c, iv);
                (constant + curie_weiss_partition(&params).log_value, Some(params))
            }
        };
        total += log_value;
        factors.push(CliqueFactor { clique: nodes.clone(), free, log_value, params });
    }
    Ok(CliqueProduct { estimate: PartitionEstimate::new(total, Method::CliqueProduct), factors })
}

/// True conditional normaliser `Σ_{x_free} exp(log_weight(x_free, x_A*))`
/// by direct enumeration of the full model with clamped nodes held fixed.
pub fn exact_conditional_partition(m: &IsingModel, iv: &InterventionSpec, cap: usize) -> Result<PartitionEstimate> {
    let n = m.node_count();
    iv.validate(n)?;
    let free: Vec<NodeId> = (0..n).filter(|&v| !iv.contains(v)).collect();
    check_cap(free.len(), cap)?;
    let mut acc = LogSumExp::new();
    if n <= 64 {
        let base = iv.iter().filter(|&(_, on)| on).fold(0u64, |b, (v, _)| b | 1 << v);
        for mask in 0..1u64 << free.len() {
            let mut full = base;
            for (pos, &v) in free.iter().enumerate() {
                full |= (mask >> pos & 1) << v;
            }
            acc.push(m.log_weight_mask(full));
        }
    } else {
        let mut x = crate::ising::Configuration::zeros(n);
        for (v, on) in iv.iter() {
            x.set(v, on);
        }
        for mask in 0..1u64 << free.len() {
            for (pos, &v) in free.iter().enumerate() {
                x.set(v, mask >> pos & 1 == 1);
            }
            acc.push(m.log_weight(&x)?);
        }
    }
    Ok(PartitionEstimate::new(acc.value(), Method::Exact))
}
