//! Approximation-error experiments for the Curie-Weiss clique normaliser.
//!
//! One replication draws the `k` thresholds and `k(k-1)/2` interactions of
//! a clique around fixed means, averages them, and compares the Curie-Weiss
//! normaliser at the averages (`Z̄`) with the one at the true means (`Z`).
//!
//! Every replication gets its own ChaCha8 stream: the key comes from the
//! configured seed and the stream id from `(k index, σ index, replication)`,
//! so a record does not depend on which thread computed it or in what order.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::IsingModel;
use crate::partition::{curie_weiss_partition, exact_partition, CurieWeissParams};

/// Distribution of a parameter around its mean, at scale `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamFamily {
    /// Normal with standard deviation `s`.
    #[default]
    Gaussian,
    /// Uniform on `[μ - s/2, μ + s/2]`, i.e. support of width `s`.
    Bounded,
}

impl ParamFamily {
    pub fn tag(self) -> &'static str {
        match self {
            ParamFamily::Gaussian => "gaussian",
            ParamFamily::Bounded => "bounded",
        }
    }

    fn draw<R: Rng + ?Sized>(self, mean: f64, scale: f64, rng: &mut R) -> f64 {
        match self {
            ParamFamily::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                mean + scale * z
            }
            ParamFamily::Bounded => {
                let u: f64 = rng.random();
                mean + scale * (u - 0.5)
            }
        }
    }
}

impl core::str::FromStr for ParamFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "bounded" | "uniform" => Ok(Self::Bounded),
            other => Err(Error::UnknownTag(alloc::string::ToString::to_string(other))),
        }
    }
}

/// The `ν` fed to the Curie-Weiss sum in [`error_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuRule {
    /// `ν = k - 1`: every clique node neighbours every other one.
    CliqueDegree,
    /// A fixed average neighbour count, independent of `k`.
    Fixed(f64),
}

impl NuRule {
    pub fn nu(self, k: usize) -> f64 {
        match self {
            NuRule::CliqueDegree => k.saturating_sub(1) as f64,
            NuRule::Fixed(nu) => nu,
        }
    }
}

impl Default for NuRule {
    /// Average degree of the five-node, five-edge example graph.
    fn default() -> Self {
        NuRule::Fixed(2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub clique_sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub reps: usize,
    pub theta0: f64,
    pub theta1: f64,
    pub delta: f64,
    pub seed: u64,
    pub family: ParamFamily,
    pub nu: NuRule,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            clique_sizes: (1..=10).map(|i| 10 * i).collect(),
            sigmas: (1..=10).map(f64::from).collect(),
            reps: 100,
            theta0: 0.0,
            theta1: 0.5,
            delta: 0.05,
            seed: 20_180_601,
            family: ParamFamily::Gaussian,
            nu: NuRule::default(),
        }
    }
}

// Stream ids pack the three indices into 21 bits each.
const INDEX_BITS: u32 = 21;

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1"));
        }
        if self.clique_sizes.is_empty() || self.sigmas.is_empty() {
            return Err(Error::InvalidConfig("grids must not be empty"));
        }
        if self.clique_sizes.iter().any(|&k| k < 2) {
            return Err(Error::InvalidConfig("clique sizes must be at least 2"));
        }
        if self.sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidConfig("sigmas must be finite and non-negative"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig("delta must lie in (0, 1)"));
        }
        if !(self.theta0.is_finite() && self.theta1.is_finite()) {
            return Err(Error::InvalidConfig("theta0 and theta1 must be finite"));
        }
        if let NuRule::Fixed(nu) = self.nu {
            if !(nu.is_finite() && nu >= 0.0) {
                return Err(Error::InvalidConfig("nu must be finite and non-negative"));
            }
        }
        let limit = 1usize << INDEX_BITS;
        if self.clique_sizes.len() >= limit || self.sigmas.len() >= limit || self.reps >= limit {
            return Err(Error::InvalidConfig("grid or replication count too large"));
        }
        Ok(())
    }

    /// Every `(k index, σ index, replication)` triple in output order.
    pub fn replication_indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.clique_sizes.len() * self.sigmas.len() * self.reps);
        for ki in 0..self.clique_sizes.len() {
            for si in 0..self.sigmas.len() {
                for rep in 0..self.reps {
                    out.push((ki, si, rep));
                }
            }
        }
        out
    }
}

/// Generator for one replication.
pub fn replication_rng(seed: u64, k_index: usize, sigma_index: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = ((k_index as u64) << (2 * INDEX_BITS)) | ((sigma_index as u64) << INDEX_BITS) | rep as u64;
    rng.set_stream(stream);
    rng
}

/// Sampled parameters of a `k`-clique. `weights` follow the pair order
/// `(0,1), (0,2), .., (k-2,k-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueParams {
    pub thresholds: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CliqueParams {
    pub fn into_model(self) -> Result<IsingModel> {
        let k = self.thresholds.len();
        IsingModel::new(Graph::complete(k)?, self.thresholds, self.weights)
    }
}

/// Thresholds at scale `σ/k` around `theta0`, interactions at scale `σ/√k`
/// around `theta1`, all independent.
pub fn sample_clique_params<R: Rng + ?Sized>(
    k: usize,
    sigma: f64,
    theta0: f64,
    theta1: f64,
    family: ParamFamily,
    rng: &mut R,
) -> CliqueParams {
    let kf = k as f64;
    let threshold_scale = sigma / kf;
    let weight_scale = sigma / libm::sqrt(kf);
    let thresholds = (0..k).map(|_| family.draw(theta0, threshold_scale, rng)).collect();
    let weights = (0..k * k.saturating_sub(1) / 2).map(|_| family.draw(theta1, weight_scale, rng)).collect();
    CliqueParams { thresholds, weights }
}

/// Sample mean, summed as deviations from `center` so that draws equal to
/// `center` average back to it exactly.
pub fn centered_mean(xs: &[f64], center: f64) -> f64 {
    if xs.is_empty() {
        return center;
    }
    center + xs.iter().map(|x| x - center).sum::<f64>() / xs.len() as f64
}

/// One replication of an error experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub k: usize,
    pub sigma: f64,
    pub rep: usize,
    /// `log Z̄`, the Curie-Weiss normaliser at the sampled averages.
    pub zbar_log: f64,
    /// `log Z`, the reference normaliser.
    pub z_log: f64,
    /// `Z̄ - Z`
    pub diff: f64,
    /// `Z̄ / Z`
    pub ratio: f64,
    pub theta0_bar: f64,
    pub theta1_bar: f64,
}

impl ErrorRecord {
    fn new(k: usize, sigma: f64, rep: usize, zbar_log: f64, z_log: f64, theta0_bar: f64, theta1_bar: f64) -> Self {
        let gap = zbar_log - z_log;
        Self {
            k,
            sigma,
            rep,
            zbar_log,
            z_log,
            diff: libm::exp(z_log) * libm::expm1(gap),
            ratio: libm::exp(gap),
            theta0_bar,
            theta1_bar,
        }
    }

    pub fn zbar(&self) -> f64 {
        libm::exp(self.zbar_log)
    }

    pub fn z(&self) -> f64 {
        libm::exp(self.z_log)
    }
}

/// Replication `rep` of cell `(k_index, sigma_index)`: reference `Z` is the
/// Curie-Weiss value at the true means.
pub fn error_replication(cfg: &SimulationConfig, k_index: usize, sigma_index: usize, rep: usize) -> ErrorRecord {
    let k = cfg.clique_sizes[k_index];
    let sigma = cfg.sigmas[sigma_index];
    let mut rng = replication_rng(cfg.seed, k_index, sigma_index, rep);
    let params = sample_clique_params(k, sigma, cfg.theta0, cfg.theta1, cfg.family, &mut rng);
    let theta0_bar = centered_mean(&params.thresholds, cfg.theta0);
    let theta1_bar = centered_mean(&params.weights, cfg.theta1);
    let nu = cfg.nu.nu(k);
    let zbar = curie_weiss_partition(&CurieWeissParams { k, nu, theta0: theta0_bar, theta1: theta1_bar });
    let z = curie_weiss_partition(&CurieWeissParams { k, nu, theta0: cfg.theta0, theta1: cfg.theta1 });
    ErrorRecord::new(k, sigma, rep, zbar.log_value, z.log_value, theta0_bar, theta1_bar)
}

/// All replications of `cfg`, ordered by `(k, σ, rep)`.
pub fn error_experiment(cfg: &SimulationConfig) -> Result<Vec<ErrorRecord>> {
    cfg.validate()?;
    Ok(cfg.replication_indices().into_iter().map(|(ki, si, rep)| error_replication(cfg, ki, si, rep)).collect())
}

/// Like [`error_replication`] but the reference `Z` is the exact normaliser
/// of the sampled heterogeneous clique, and `ν = k - 1`.
pub fn small_k_exact_replication(
    cfg: &SimulationConfig,
    k_index: usize,
    sigma_index: usize,
    rep: usize,
    cap: usize,
) -> Result<ErrorRecord> {
    let k = cfg.clique_sizes[k_index];
    let sigma = cfg.sigmas[sigma_index];
    let mut rng = replication_rng(cfg.seed, k_index, sigma_index, rep);
    let params = sample_clique_params(k, sigma, cfg.theta0, cfg.theta1, cfg.family, &mut rng);
    let theta0_bar = centered_mean(&params.thresholds, cfg.theta0);
    let theta1_bar = centered_mean(&params.weights, cfg.theta1);
    let z = exact_partition(&params.into_model()?, cap)?;
    let zbar = curie_weiss_partition(&CurieWeissParams::clique(k, theta0_bar, theta1_bar));
    Ok(ErrorRecord::new(k, sigma, rep, zbar.log_value, z.log_value, theta0_bar, theta1_bar))
}

pub fn small_k_exact_comparison(cfg: &SimulationConfig, cap: usize) -> Result<Vec<ErrorRecord>> {
    cfg.validate()?;
    if let Some(&k) = cfg.clique_sizes.iter().find(|&&k| k > cap) {
        return Err(Error::CapExceeded { free: k, cap });
    }
    cfg.replication_indices()
        .into_iter()
        .map(|(ki, si, rep)| small_k_exact_replication(cfg, ki, si, rep, cap))
        .collect()
}

/// Aggregate of one `(k, σ)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub k: usize,
    pub sigma: f64,
    pub reps: usize,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub mean_abs_diff: f64,
    pub se_abs_diff: f64,
    pub median_abs_ratio_dev: f64,
    pub mad_abs_ratio_dev: f64,
}

/// Summaries of consecutive runs of records sharing `(k, σ)`.
pub fn summarize(records: &[ErrorRecord]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let (k, sigma) = (records[start].k, records[start].sigma);
        let end = start + records[start..].iter().take_while(|r| r.k == k && r.sigma == sigma).count();
        let cell = &records[start..end];
        let diffs: Vec<f64> = cell.iter().map(|r| r.diff).collect();
        let abs_diffs: Vec<f64> = diffs.iter().map(|d| libm::fabs(*d)).collect();
        let ratio_dev: Vec<f64> = cell.iter().map(|r| libm::fabs(r.ratio - 1.0)).collect();
        let (mean_diff, sd_diff) = mean_sd(&diffs);
        let (mean_abs_diff, sd_abs) = mean_sd(&abs_diffs);
        out.push(CellSummary {
            k,
            sigma,
            reps: cell.len(),
            mean_diff,
            sd_diff,
            mean_abs_diff,
            se_abs_diff: sd_abs / libm::sqrt(cell.len() as f64),
            median_abs_ratio_dev: median(&ratio_dev),
            mad_abs_ratio_dev: median_abs_deviation(&ratio_dev),
        });
        start = end;
    }
    out
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

pub fn median_abs_deviation(xs: &[f64]) -> f64 {
    let m = median(xs);
    let dev: Vec<f64> = xs.iter().map(|x| libm::fabs(x - m)).collect();
    median(&dev)
}

/// Deviation `t` such that the mean interaction of a `k`-clique stays
/// within `t` of its centre with probability `1 - δ`:
/// `t = σ √(log(2/δ) / (2 k² (k-1)))`.
pub fn hoeffding_t_bound(k: usize, sigma: f64, delta: f64) -> f64 {
    let kf = k as f64;
    sigma * libm::sqrt(libm::log(2.0 / delta) / (2.0 * kf * kf * (kf - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingReport {
    pub k: usize,
    pub sigma: f64,
    pub t_bound: f64,
    pub violations: usize,
    pub empirical_violation_rate: f64,
    pub delta: f64,
    pub n_reps: usize,
}

impl HoeffdingReport {
    /// Three binomial standard errors at rate `δ`.
    pub fn slack(&self) -> f64 {
        3.0 * libm::sqrt(self.delta * (1.0 - self.delta) / self.n_reps as f64)
    }

    pub fn passes(&self) -> bool {
        self.empirical_violation_rate <= self.delta + self.slack()
    }
}

/// Fraction of replications in which the mean of `k(k-1)/2` sampled
/// interactions deviates from its centre by more than
/// [`hoeffding_t_bound`].
pub fn hoeffding_check<R: Rng + ?Sized>(
    k: usize,
    sigma: f64,
    delta: f64,
    reps: usize,
    family: ParamFamily,
    rng: &mut R,
) -> Result<HoeffdingReport> {
    if reps < 100 {
        return Err(Error::InvalidConfig("hoeffding_check needs at least 100 replications"));
    }
    if k < 2 {
        return Err(Error::InvalidConfig("clique sizes must be at least 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig("delta must lie in (0, 1)"));
    }
    let t_bound = hoeffding_t_bound(k, sigma, delta);
    let scale = sigma / libm::sqrt(k as f64);
    let pairs = k * (k - 1) / 2;
    let mut draws = vec![0.0; pairs];
    let mut violations = 0;
    for _ in 0..reps {
        for d in &mut draws {
            *d = family.draw(0.0, scale, rng);
        }
        if libm::fabs(centered_mean(&draws, 0.0)) > t_bound {
            violations += 1;
        }
    }
    Ok(HoeffdingReport {
        k,
        sigma,
        t_bound,
        violations,
        empirical_violation_rate: violations as f64 / reps as f64,
        delta,
        n_reps: reps,
    })
}
