use super::{Error, Result};
use crate::metric::{lambda_metric, AcrMatrix, Hypothesis};

/// Largest block size accepted by [`msdd_exhaustive`] (`2^L` hypotheses).
pub const EXHAUSTIVE_MAX_BLOCK: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveResult {
    pub hard: Hypothesis,
    pub lambda_best: f64,
    pub lambda_counter: Vec<f64>,
    pub llr: Vec<f64>,
}

/// GLRT-optimal MSDD with max-log LLRs by full enumeration of all `2^L`
/// hypotheses. Ties keep the first hypothesis in index order.
pub fn msdd_exhaustive(z: &AcrMatrix) -> Result<ExhaustiveResult> {
    let len = z.block_size();
    if len > EXHAUSTIVE_MAX_BLOCK {
        return Err(Error::BlockTooLarge {
            block_size: len,
            limit: EXHAUSTIVE_MAX_BLOCK,
        });
    }
    let metrics: Vec<f64> = (0..1u64 << len)
        .map(|idx| lambda_metric(z, &Hypothesis::from_index(len, idx)))
        .collect();

    let mut best_idx = 0u64;
    for (idx, &m) in metrics.iter().enumerate() {
        if m < metrics[best_idx as usize] {
            best_idx = idx as u64;
        }
    }
    let lambda_best = metrics[best_idx as usize];

    let mut lambda_counter = vec![f64::INFINITY; len];
    for (idx, &m) in metrics.iter().enumerate() {
        let differs = idx as u64 ^ best_idx;
        for (k, counter) in lambda_counter.iter_mut().enumerate() {
            if differs >> k & 1 == 1 && m < *counter {
                *counter = m;
            }
        }
    }

    let hard = Hypothesis::from_index(len, best_idx);
    let scale = 1.0 / (z.sigma_n2() * (len as f64 + 1.0));
    let llr = lambda_counter
        .iter()
        .zip(hard.symbols())
        .map(|(&c, &a)| f64::from(a) * (c - lambda_best) * scale)
        .collect();
    Ok(ExhaustiveResult {
        hard,
        lambda_best,
        lambda_counter,
        llr,
    })
}
