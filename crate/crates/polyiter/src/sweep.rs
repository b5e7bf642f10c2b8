//! Averaged sums with the initial-vector sweep spread over a thread pool.
//!
//! Terms are collected in index order and reduced by the same routine the
//! sequential path uses, so the result does not depend on the worker count.

use polyiter_core::stats::{self, AvgSumKernel, AvgSumSpec};
use polyiter_core::SystemFamily;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Core(#[from] polyiter_core::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// `U` or `V` as described by `spec`, refusing to start when
/// `p^{m+1} * N > budget`.
pub fn avg_sum(family: &SystemFamily, spec: &AvgSumSpec, budget: u128, workers: usize) -> Result<f64, SweepError> {
    let vectors = spec.check_budget(family, budget)?;
    let kernel = AvgSumKernel::new(family, spec)?;
    if workers <= 1 {
        let terms: Vec<f64> = (0..vectors).map(|i| kernel.term(i)).collect();
        return Ok(stats::reduce_terms(&terms));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let terms: Vec<f64> = pool.install(|| (0..vectors).into_par_iter().map(|i| kernel.term(i)).collect());
    Ok(stats::reduce_terms(&terms))
}
