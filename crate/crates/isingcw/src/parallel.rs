//! Rayon drivers. Results never depend on the thread count: work is split
//! into a fixed layout and gathered back in order.

use isingcw_core::partition::{enumeration_blocks, exact_log_sum_block, MAX_CAP};
use isingcw_core::simulation::{error_replication, small_k_exact_replication};
use isingcw_core::{Error, ErrorRecord, IsingModel, Method, PartitionEstimate, SimulationConfig};
use rayon::prelude::*;

use crate::error::AppError;

/// Number of enumeration blocks for the parallel exact engine.
pub const EXACT_BLOCKS: usize = 256;

/// Pool with `threads` workers; 0 picks rayon's default.
pub fn pool(threads: usize) -> Result<rayon::ThreadPool, AppError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start {threads} threads: {e}")))
}

pub fn exact_partition(m: &IsingModel, cap: usize, threads: usize) -> Result<PartitionEstimate, AppError> {
    let n = m.node_count();
    let cap = cap.min(MAX_CAP);
    if n > cap {
        return Err(Error::CapExceeded { free: n, cap }.into());
    }
    if n < 16 {
        return Ok(isingcw_core::exact_partition(m, cap)?);
    }
    let blocks = enumeration_blocks(n, EXACT_BLOCKS);
    let partial: Vec<_> =
        pool(threads)?.install(|| blocks.par_iter().map(|&(start, end)| exact_log_sum_block(m, start, end)).collect());
    let mut acc = partial[0];
    for block in &partial[1..] {
        acc.merge(block);
    }
    Ok(PartitionEstimate::new(acc.value(), Method::Exact))
}

pub fn error_experiment(cfg: &SimulationConfig, threads: usize) -> Result<Vec<ErrorRecord>, AppError> {
    cfg.validate()?;
    let jobs = cfg.replication_indices();
    Ok(pool(threads)?.install(|| jobs.par_iter().map(|&(ki, si, rep)| error_replication(cfg, ki, si, rep)).collect()))
}

pub fn small_k_exact_comparison(
    cfg: &SimulationConfig,
    cap: usize,
    threads: usize,
) -> Result<Vec<ErrorRecord>, AppError> {
    cfg.validate()?;
    if let Some(&k) = cfg.clique_sizes.iter().find(|&&k| k > cap) {
        return Err(Error::CapExceeded { free: k, cap }.into());
    }
    let jobs = cfg.replication_indices();
    let records: Result<Vec<_>, Error> = pool(threads)?
        .install(|| jobs.par_iter().map(|&(ki, si, rep)| small_k_exact_replication(cfg, ki, si, rep, cap)).collect());
    Ok(records?)
}
