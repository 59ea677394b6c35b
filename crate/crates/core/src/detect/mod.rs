//! Differential detectors operating on one [`AcrMatrix`](crate::AcrMatrix).
//!
//! LLRs follow the convention `LLR_i = log P(a_i = +1) / P(a_i = -1)`.

mod dd;
mod exhaustive;
mod sphere;

pub use dd::{dd_hard, dd_soft};
pub use exhaustive::{msdd_exhaustive, ExhaustiveResult, EXHAUSTIVE_MAX_BLOCK};
pub use sphere::{
    hosd, hosd_observed, sosd, sosd_observed, stopping_radius, HardDecision, SearchTree,
};

use crate::error::{Error, Result};
use crate::metric::Hypothesis;

/// Magnitude reported for an LLR whose counterhypothesis was never reached
/// (possible only with `llr_max = inf` and early termination).
pub const UNBOUNDED_LLR: f64 = 1.0e12;

/// Sphere-decoder settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    pub block_size: usize,
    /// LLR clipping level; `f64::INFINITY` disables clipping, `0` gives hard output.
    pub llr_max: f64,
    pub use_stopping_criterion: bool,
}

impl DetectorConfig {
    pub fn new(block_size: usize, llr_max: f64, use_stopping_criterion: bool) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidInput(
                "block size L must be at least 1".into(),
            ));
        }
        if llr_max.is_nan() || llr_max < 0.0 {
            return Err(Error::InvalidInput(format!(
                "llr_max must be >= 0, got {llr_max}"
            )));
        }
        if block_size > 63 {
            return Err(Error::InvalidInput(format!(
                "block size {block_size} exceeds the supported maximum of 63"
            )));
        }
        Ok(Self {
            block_size,
            llr_max,
            use_stopping_criterion,
        })
    }

    /// Unclipped soft output without early termination.
    pub fn max_log(block_size: usize) -> Self {
        Self::new(block_size, f64::INFINITY, false).expect("valid block size")
    }
}

/// Output of the soft-output sphere decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftDecision {
    pub llr: Vec<f64>,
    /// GLRT-optimal sequence found by the search.
    pub hard: Hypothesis,
    pub lambda_best: f64,
    /// Counterhypothesis metrics after the search (`f64::INFINITY` if never reached).
    pub lambda_counter: Vec<f64>,
    pub nodes_visited: u64,
    pub terminated_early: bool,
    /// `true` where the LLR is the [`UNBOUNDED_LLR`] sentinel.
    pub unbounded: Vec<bool>,
}

/// Worst-case number of visited nodes of a binary tree of depth `L`: `2^{L+1} - 2`.
pub fn max_nodes(block_size: usize) -> u64 {
    (1u64 << (block_size + 1)) - 2
}
