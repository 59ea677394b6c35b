//! Soft-output multiple-symbol differential detection (MSDD) for impulse-radio
//! UWB autocorrelation receivers.
//!
//! The crate is organised bottom-up:
//!
//! - [`metric`]: the autocorrelation statistics [`AcrMatrix`], hypotheses and
//!   the GLRT metric algebra shared by every detector.
//! - [`waveform`]: pulse shaping, a Saleh–Valenzuela style multipath channel,
//!   the sampled receive signal, the L-branch autocorrelation front-end and a
//!   fast semi-analytic generator for the same statistics.
//! - [`detect`]: symbol-by-symbol differential detection, the exhaustive GLRT
//!   oracle, and the hard- and soft-output sphere decoders.
//! - [`coding`]: the BICM outer chain (convolutional code, interleaver,
//!   differential mapping, soft-input Viterbi decoder).
//! - [`sim`]: Monte-Carlo BER, tradeoff and overall-complexity experiments.

pub mod coding;
pub mod detect;
pub mod error;
pub mod metric;
pub mod sim;
pub mod waveform;

pub use error::{Error, Result};
pub use metric::{AcrMatrix, Hypothesis};
