//! Exact and approximate partition functions for binary Ising models, with
//! interventions treated as conditioning.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and thread-parallel drivers live in the `isingcw` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod graph;
pub mod intervention;
pub mod ising;
pub mod numeric;
pub mod partition;
pub mod simulation;

pub use error::{Error, Result};
pub use graph::{CliqueSet, Graph, NodeId};
pub use intervention::{
    apply_intervention, conditional_normalizer, conditional_probability, marginals, rank_interventions, ImpactMetric,
    Inference, InferenceMethod, InterventionRanking, InterventionSpec, MarginalTable, ReducedModel,
};
pub use ising::{clique_log_weight, CliquePotentialAssignment, Configuration, IsingModel};
pub use partition::{
    clique_product_partition, curie_weiss_partition, exact_conditional_partition, exact_partition, inner_approximation,
    pairwise_product, reduce_clique, CurieWeissParams, Method, PartitionEstimate, PerCliqueMethod, ThetaOneRule,
    DEFAULT_CAP,
};
pub use simulation::{
    error_experiment, hoeffding_check, small_k_exact_comparison, ErrorRecord, HoeffdingReport, NuRule, ParamFamily,
    SimulationConfig,
};
