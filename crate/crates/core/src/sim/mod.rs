//! Monte-Carlo experiments over the coded link: encode, interleave,
//! differential mapping, multipath channel and ACR front-end, MSDD detection,
//! deinterleaving and Viterbi decoding.
//!
//! Every frame draws from its own ChaCha8 stream derived from the master
//! seed, the grid-point index and the frame index, and frames are simulated
//! in fixed-size rounds, so results do not depend on the thread count.

mod chain;
mod config;
mod report;
mod selftest;
mod sweep;

pub use chain::{
    decode_frame, observe_frame, simulate_frame, ChainSetup, DetectorSpec, FrameObservation,
    FrameStats,
};
pub use config::{
    DetectorKind, ExperimentConfig, FrontEndMode, OverallConfig, TimingConfig, TradeoffConfig,
};
pub use report::{to_csv_string, write_csv, Manifest};
pub use selftest::{random_instance, run_selftest, CheckResult};
pub use sweep::{
    overall_complexity, reference_complexity, required_ebn0, run_ber_sweep, run_overall_complexity,
    run_tradeoff, select_candidate, simulate_point, sweep_detector, target_point, CandidateRow,
    OverallReport, OverallRow, ResultRow, TargetPoint, TradeoffReport, TradeoffRow,
};
