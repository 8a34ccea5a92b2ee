//! Intervention by replacement, which in an undirected model is the same
//! as conditioning on the clamped values.
//!
//! Clamping node `j` to `x_j*` turns every edge `(i, j)` with `x_j* = 1`
//! into extra threshold `θ_ij` on `i` and drops `j` from the model. What is
//! left is an ordinary Ising model on the free nodes plus a constant log
//! offset from terms that touch clamped nodes only.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::ising::{CliquePotentialAssignment, Configuration, IsingModel};
use crate::numeric::{sigmoid, LogSumExp};
use crate::partition::{
    clique_product_partition, exact_partition, gray_walk, Method, PartitionEstimate, PerCliqueMethod, ThetaOneRule,
    DEFAULT_CAP,
};

/// The clamped node set `A` with its values `x_A*`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct InterventionSpec {
    assignments: BTreeMap<NodeId, bool>,
}

impl InterventionSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a spec from `(node, value)` pairs; values must be 0 or 1 and a
    /// node may not be given two different values.
    pub fn from_pairs(pairs: &[(NodeId, u8)]) -> Result<Self> {
        let mut spec = Self::new();
        for &(node, value) in pairs {
            if value > 1 {
                return Err(Error::NonBinaryValue { node, value });
            }
            match spec.assignments.insert(node, value == 1) {
                Some(prev) if prev != (value == 1) => {
                    return Err(Error::MalformedSpec(alloc::format!("node {node} given two values")));
                }
                _ => {}
            }
        }
        Ok(spec)
    }

    pub fn single(node: NodeId, value: bool) -> Self {
        let mut spec = Self::new();
        spec.set(node, value);
        spec
    }

    pub fn set(&mut self, node: NodeId, value: bool) {
        self.assignments.insert(node, value);
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.assignments.contains_key(&node)
    }

    pub fn value(&self, node: NodeId) -> Option<bool> {
        self.assignments.get(&node).copied()
    }

    /// `(node, value)` in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, bool)> + '_ {
        self.assignments.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.assignments.keys().find(|&&k| k >= n) {
            Some(&node) => Err(Error::NodeOutOfRange { node, n }),
            None => Ok(()),
        }
    }

    /// Free nodes of an `n`-node model, ascending.
    pub fn free_nodes(&self, n: usize) -> Vec<NodeId> {
        (0..n).filter(|&v| !self.contains(v)).collect()
    }
}

/// Parses `node=value` pairs separated by commas, e.g. `2=1,7=0`.
/// An empty (or all-whitespace) string is the empty intervention.
impl FromStr for InterventionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::new());
        }
        for item in s.split(',') {
            let item = item.trim();
            let (node, value) = item
                .split_once('=')
                .ok_or_else(|| Error::MalformedSpec(alloc::format!("`{item}` is not node=value")))?;
            let node: NodeId = node
                .trim()
                .parse()
                .map_err(|_| Error::MalformedSpec(alloc::format!("bad node id `{}`", node.trim())))?;
            let value: u8 = match value.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(Error::MalformedSpec(alloc::format!("value `{other}` is not 0 or 1"))),
            };
            pairs.push((node, value));
        }
        Self::from_pairs(&pairs)
    }
}

impl fmt::Display for InterventionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (node, value)) in self.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{node}={}", value as u8)?;
        }
        Ok(())
    }
}

/// The model left on the free nodes after clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    /// Model over `free`, relabelled to `0..free.len()`.
    pub model: IsingModel,
    /// Original id of each reduced node, ascending.
    pub free: Vec<NodeId>,
    /// Log of the weight terms involving clamped nodes only.
    pub offset: f64,
}

impl ReducedModel {
    /// Full configuration of the original model: `x_free` on the free nodes
    /// and the clamped values elsewhere.
    pub fn lift(&self, x_free: &Configuration, iv: &InterventionSpec, n: usize) -> Result<Configuration> {
        if x_free.len() != self.free.len() {
            return Err(Error::LengthMismatch { expected: self.free.len(), found: x_free.len() });
        }
        let mut x = Configuration::zeros(n);
        for (v, on) in iv.iter() {
            x.set(v, on);
        }
        for (local, &v) in self.free.iter().enumerate() {
            x.set(v, x_free.get(local));
        }
        Ok(x)
    }

    /// Original-model log weight at the clamped configuration.
    pub fn log_weight(&self, x_free: &Configuration) -> Result<f64> {
        Ok(self.model.log_weight(x_free)? + self.offset)
    }
}

/// Clamps the nodes of `iv` and absorbs their edges into the free nodes'
/// thresholds: `θ_i' = θ_i + Σ_{j ∈ A, x_j* = 1} θ_ij`.
pub fn apply_intervention(m: &IsingModel, iv: &InterventionSpec) -> Result<ReducedModel> {
    let n = m.node_count();
    iv.validate(n)?;
    let free = iv.free_nodes(n);
    let reduced = m.induced(&free)?;
    let thresholds = free
        .iter()
        .map(|&i| {
            let absorbed: f64 =
                m.weighted_neighbors(i).iter().filter(|&&(j, _)| iv.value(j) == Some(true)).map(|&(_, w)| w).sum();
            m.threshold(i) + absorbed
        })
        .collect();
    let model = IsingModel::new(reduced.graph().clone(), thresholds, reduced.weights().to_vec())?;
    let mut offset = 0.0;
    for (a, on) in iv.iter() {
        if on {
            offset += m.threshold(a);
            for &(b, w) in m.weighted_neighbors(a) {
                if b > a && iv.value(b) == Some(true) {
                    offset += w;
                }
            }
        }
    }
    Ok(ReducedModel { model, free, offset })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InferenceMethod {
    /// Enumeration, one connected component of the reduced model at a time.
    Exact,
    /// Per-clique Curie-Weiss normalisers multiplied over cliques.
    CurieWeiss,
}

impl InferenceMethod {
    pub fn tag(self) -> &'static str {
        match self {
            InferenceMethod::Exact => "exact",
            InferenceMethod::CurieWeiss => "curie_weiss_clique_product",
        }
    }
}

impl FromStr for InferenceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "cw" | "curie-weiss" | "curie_weiss" | "curie_weiss_clique_product" => Ok(Self::CurieWeiss),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

/// Method plus the knobs the engines need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inference {
    pub method: InferenceMethod,
    /// Largest block the exact engines will enumerate.
    pub cap: usize,
    pub rule: ThetaOneRule,
}

impl Inference {
    pub fn exact() -> Self {
        Self { method: InferenceMethod::Exact, cap: DEFAULT_CAP, rule: ThetaOneRule::FreeEdges }
    }

    pub fn curie_weiss() -> Self {
        Self { method: InferenceMethod::CurieWeiss, ..Self::exact() }
    }

    pub fn with_cap(self, cap: usize) -> Self {
        Self { cap, ..self }
    }
}

impl From<InferenceMethod> for Inference {
    fn from(method: InferenceMethod) -> Self {
        Self { method, ..Self::exact() }
    }
}

fn component_models(reduced: &ReducedModel) -> Result<Vec<(Vec<NodeId>, IsingModel)>> {
    reduced
        .model
        .graph()
        .components()
        .into_iter()
        .map(|comp| {
            let sub = reduced.model.induced(&comp)?;
            Ok((comp, sub))
        })
        .collect()
}

/// Normaliser of the conditional distribution given `iv`, in the scale of
/// the original model's weights (clamped constants included).
pub fn conditional_normalizer(
    m: &IsingModel,
    iv: &InterventionSpec,
    inference: Inference,
) -> Result<PartitionEstimate> {
    match inference.method {
        InferenceMethod::Exact => {
            let reduced = apply_intervention(m, iv)?;
            let mut log_value = reduced.offset;
            for (_, sub) in component_models(&reduced)? {
                log_value += exact_partition(&sub, inference.cap)?.log_value;
            }
            Ok(PartitionEstimate::new(log_value, Method::Exact))
        }
        InferenceMethod::CurieWeiss => {
            let assignment = CliquePotentialAssignment::new(m.graph());
            let product = clique_product_partition(
                m,
                &assignment,
                iv,
                PerCliqueMethod::CurieWeiss,
                inference.rule,
                inference.cap,
            )?;
            Ok(product.estimate)
        }
    }
}

/// `P(x_free | x_A*)` where `x_free` lists the free nodes in ascending order.
pub fn conditional_probability(
    m: &IsingModel,
    iv: &InterventionSpec,
    x_free: &Configuration,
    inference: Inference,
) -> Result<f64> {
    let reduced = apply_intervention(m, iv)?;
    let log_weight = reduced.log_weight(x_free)?;
    let normalizer = conditional_normalizer(m, iv, inference)?;
    Ok(libm::exp(log_weight - normalizer.log_value))
}

/// `P(x_i = 1 | x_A*)` for every free node.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    pub method: InferenceMethod,
    /// `(node, probability)` in ascending node order.
    pub entries: Vec<(NodeId, f64)>,
}

impl MarginalTable {
    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.entries.binary_search_by_key(&node, |&(v, _)| v).ok().map(|idx| self.entries[idx].1)
    }
}

fn exact_component_marginals(sub: &IsingModel, cap: usize) -> Result<Vec<f64>> {
    let n = sub.node_count();
    // also enforces the cap
    exact_partition(sub, cap)?;
    let mut total = LogSumExp::new();
    let mut on = vec![LogSumExp::new(); n];
    gray_walk(sub, 0, 1u64 << n, |mask, lw| {
        total.push(lw);
        let mut rest = mask;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            on[bit].push(lw);
            rest &= rest - 1;
        }
    });
    let log_z = total.value();
    Ok(on.iter().map(|acc| libm::exp(acc.value() - log_z)).collect())
}

fn curie_weiss_component_marginals(sub: &IsingModel, inference: Inference) -> Result<Vec<f64>> {
    let assignment = CliquePotentialAssignment::new(sub.graph());
    (0..sub.node_count())
        .map(|i| {
            let log_z = |value| {
                clique_product_partition(
                    sub,
                    &assignment,
                    &InterventionSpec::single(i, value),
                    PerCliqueMethod::CurieWeiss,
                    inference.rule,
                    inference.cap,
                )
                .map(|p| p.estimate.log_value)
            };
            Ok(sigmoid(log_z(true)? - log_z(false)?))
        })
        .collect()
}

/// Marginals of the free nodes under `iv`.
///
/// Both methods work per connected component of the reduced model. The
/// approximate method sets `P(x_i = 1) = Z(x_i=1) / (Z(x_i=0) + Z(x_i=1))`
/// with both normalisers from the Curie-Weiss clique product.
pub fn marginals(m: &IsingModel, iv: &InterventionSpec, inference: Inference) -> Result<MarginalTable> {
    let reduced = apply_intervention(m, iv)?;
    let mut entries = Vec::with_capacity(reduced.free.len());
    for (comp, sub) in component_models(&reduced)? {
        let probs = match inference.method {
            InferenceMethod::Exact => exact_component_marginals(&sub, inference.cap)?,
            InferenceMethod::CurieWeiss => curie_weiss_component_marginals(&sub, inference)?,
        };
        entries.extend(comp.iter().zip(probs).map(|(&local, p)| (reduced.free[local], p)));
    }
    entries.sort_by_key(|&(v, _)| v);
    Ok(MarginalTable { method: inference.method, entries })
}

/// How the effect of an intervention on the other nodes is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImpactMetric {
    /// `Σ_{i≠j} |P(x_i=1 | do) - P(x_i=1)|`
    L1MarginalShift,
    /// `|Σ_{i≠j} P(x_i=1 | do) - Σ_{i≠j} P(x_i=1)|`
    ExpectedSumShift,
}

impl ImpactMetric {
    pub fn tag(self) -> &'static str {
        match self {
            ImpactMetric::L1MarginalShift => "l1_marginal_shift",
            ImpactMetric::ExpectedSumShift => "expected_sum_shift",
        }
    }
}

impl FromStr for ImpactMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "l1_marginal_shift" => Ok(Self::L1MarginalShift),
            "esum" | "expected_sum_shift" => Ok(Self::ExpectedSumShift),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub node: NodeId,
    pub value: bool,
    pub impact: f64,
}

/// Candidates sorted by impact, largest first; ties by ascending node id.
#[derive(Debug, Clone, PartialEq)]
pub struct InterventionRanking {
    pub metric: ImpactMetric,
    pub entries: Vec<RankEntry>,
}

impl InterventionRanking {
    pub fn from_entries(metric: ImpactMetric, mut entries: Vec<RankEntry>) -> Self {
        entries.sort_by(|a, b| b.impact.total_cmp(&a.impact).then(a.node.cmp(&b.node)));
        Self { metric, entries }
    }

    pub fn impact_of(&self, node: NodeId) -> Option<f64> {
        self.entries.iter().find(|e| e.node == node).map(|e| e.impact)
    }
}

/// `P(x_i = 1)` for every node of the unclamped model.
pub fn baseline_marginals(m: &IsingModel, inference: Inference) -> Result<Vec<f64>> {
    Ok(marginals(m, &InterventionSpec::new(), inference)?.entries.into_iter().map(|(_, p)| p).collect())
}

/// Impact of `do(x_candidate = value)` against `baseline` (from
/// [`baseline_marginals`]).
pub fn intervention_impact(
    m: &IsingModel,
    candidate: NodeId,
    value: bool,
    metric: ImpactMetric,
    inference: Inference,
    baseline: &[f64],
) -> Result<f64> {
    let after = marginals(m, &InterventionSpec::single(candidate, value), inference)?;
    let pairs = after.entries.iter().map(|&(i, p)| (p, baseline[i]));
    Ok(match metric {
        ImpactMetric::L1MarginalShift => pairs.map(|(p, q)| libm::fabs(p - q)).sum(),
        ImpactMetric::ExpectedSumShift => {
            let (after_sum, before_sum) = pairs.fold((0.0, 0.0), |(a, b), (p, q)| (a + p, b + q));
            libm::fabs(after_sum - before_sum)
        }
    })
}

/// Scores every single-node intervention `do(x_j = value)`.
pub fn rank_interventions(
    m: &IsingModel,
    value: bool,
    metric: ImpactMetric,
    inference: Inference,
) -> Result<InterventionRanking> {
    let baseline = baseline_marginals(m, inference)?;
    let entries = (0..m.node_count())
        .map(|j| {
            Ok(RankEntry { node: j, value, impact: intervention_impact(m, j, value, metric, inference, &baseline)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterventionRanking::from_entries(metric, entries))
}
