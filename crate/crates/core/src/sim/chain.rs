use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use super::config::{DetectorKind, ExperimentConfig, FrontEndMode};
use crate::coding::{bit_to_symbol, map_differential, segment_blocks, ConvCode, Interleaver};
use crate::detect::{dd_hard, dd_soft, hosd, max_nodes, msdd_exhaustive, sosd, DetectorConfig};
use crate::error::{Error, Result};
use crate::metric::AcrMatrix;
use crate::waveform::{
    make_receive_pulse, observe_windows, ChannelModel, FrontEndConfig, PulseFilters,
    SemiAnalyticModel, SlotVectors,
};

/// Detector and its parameters as used inside the chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorSpec {
    pub kind: DetectorKind,
    pub block_size: usize,
    pub llr_max: f64,
    pub stopping: bool,
}

impl DetectorSpec {
    /// DD detectors are forced to single-symbol windows.
    pub fn new(kind: DetectorKind, block_size: usize, llr_max: f64, stopping: bool) -> Self {
        Self {
            kind,
            block_size: if kind.is_dd() { 1 } else { block_size },
            llr_max,
            stopping,
        }
    }

    /// Whether the decoder sees reliabilities or only decisions.
    pub fn soft_output(&self) -> bool {
        match self.kind {
            DetectorKind::DdSoft | DetectorKind::MsddExhaustive => true,
            DetectorKind::Sosd => self.llr_max > 0.0,
            DetectorKind::DdHard | DetectorKind::Hosd => false,
        }
    }

    /// Symbol LLRs (`log P(+1)/P(-1)`, `+-1` for hard detectors) and the
    /// visited-node count for one window.
    pub fn detect(&self, z: &AcrMatrix) -> Result<(Vec<f64>, u64)> {
        let len = z.block_size();
        let hard = |h: &[i8]| h.iter().map(|&a| f64::from(a)).collect::<Vec<_>>();
        Ok(match self.kind {
            DetectorKind::DdHard => (hard(dd_hard(z).symbols()), len as u64),
            DetectorKind::DdSoft => (dd_soft(z), len as u64),
            DetectorKind::Hosd => {
                let cfg = DetectorConfig::new(len, 0.0, self.stopping)?;
                let out = hosd(z, &cfg);
                (hard(out.hard.symbols()), out.nodes_visited)
            }
            DetectorKind::Sosd => {
                let cfg = DetectorConfig::new(len, self.llr_max, self.stopping)?;
                let out = sosd(z, &cfg);
                if self.llr_max > 0.0 {
                    (out.llr, out.nodes_visited)
                } else {
                    (hard(out.hard.symbols()), out.nodes_visited)
                }
            }
            DetectorKind::MsddExhaustive => (msdd_exhaustive(z)?.llr, max_nodes(len)),
        })
    }
}

/// Fixed parts of the coded link: code, interleaver and pulse filters.
#[derive(Clone, Debug)]
pub struct ChainSetup {
    pub code: ConvCode,
    pub interleaver: Interleaver,
    pub info_bits: usize,
    pub front_end: FrontEndMode,
    pub filters: PulseFilters,
    pub channel: ChannelModel,
    pub timing: FrontEndConfig,
}

/// Salt separating the interleaver seed from the Monte-Carlo streams.
const INTERLEAVER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

impl ChainSetup {
    pub fn new(cfg: &ExperimentConfig, nu: u32) -> Result<Self> {
        let code = ConvCode::max_free_distance(nu)?;
        let coded = code.coded_len(cfg.info_bits);
        Ok(Self {
            code,
            interleaver: Interleaver::random(coded, cfg.seed ^ INTERLEAVER_SALT),
            info_bits: cfg.info_bits,
            front_end: cfg.front_end,
            filters: PulseFilters::new(cfg.pulse)?,
            channel: cfg.channel,
            timing: cfg.front_end_config(1, 0.0),
        })
    }
}

/// Counts from one or more frames. Complexity is accumulated over
/// full-length windows only.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameStats {
    pub bits: u64,
    pub errors: u64,
    pub windows: u64,
    pub nodes: u64,
    pub max_nodes: u64,
}

impl FrameStats {
    pub fn merge(&mut self, other: &FrameStats) {
        self.bits += other.bits;
        self.errors += other.errors;
        self.windows += other.windows;
        self.nodes += other.nodes;
        self.max_nodes = self.max_nodes.max(other.max_nodes);
    }
}

/// Random source bits, transmitted frame and observation for one frame.
pub struct FrameObservation {
    pub info: Vec<u8>,
    pub slots: SlotVectors,
}

/// Draws the information bits, a channel realization and the noisy
/// per-slot observations of one frame. Consumes `rng` identically for every
/// detector, so detectors compared on the same stream see the same frames.
pub fn observe_frame(
    setup: &ChainSetup,
    ebn0_db: f64,
    rng: &mut ChaCha8Rng,
    noiseless: bool,
) -> Result<FrameObservation> {
    let info: Vec<u8> = (0..setup.info_bits)
        .map(|_| rng.random_range(0..2))
        .collect();
    let coded = setup.code.encode(&info);
    let symbols: Vec<i8> = setup
        .interleaver
        .interleave(&coded)?
        .into_iter()
        .map(bit_to_symbol)
        .collect();
    let b = map_differential(&symbols);

    let channel = setup.channel.realize(rng.next_u64())?;
    let timing = FrontEndConfig {
        ebn0_db,
        ..setup.timing
    };
    let pulse = make_receive_pulse(&setup.filters, &channel, timing.symbol_duration_s)?;
    let noise = if noiseless { None } else { Some(rng) };
    let slots = match setup.front_end {
        FrontEndMode::SemiAnalytic => {
            SemiAnalyticModel::new(&pulse, &setup.filters, &timing)?.observe(&b, noise)?
        }
        FrontEndMode::Waveform => observe_windows(&b, &pulse, &setup.filters, &timing, noise)?,
    };
    Ok(FrameObservation { info, slots })
}

/// Detection, deinterleaving and decoding of one observed frame.
pub fn decode_frame(
    setup: &ChainSetup,
    det: &DetectorSpec,
    obs: &FrameObservation,
) -> Result<(Vec<u8>, FrameStats)> {
    let n = obs.slots.num_slots() - 1;
    let mut llr = Vec::with_capacity(n);
    let mut stats = FrameStats::default();
    for block in segment_blocks(n, det.block_size) {
        let z = obs.slots.acr_block(block.start, block.len)?;
        let (values, nodes) = det.detect(&z)?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLlr(block.start + k));
        }
        llr.extend(values);
        if block.len == det.block_size {
            stats.windows += 1;
            stats.nodes += nodes;
            stats.max_nodes = stats.max_nodes.max(nodes);
        }
    }
    let decoded = setup
        .code
        .viterbi_decode(&setup.interleaver.deinterleave(&llr)?)?;
    stats.bits = obs.info.len() as u64;
    stats.errors = decoded
        .info
        .iter()
        .zip(&obs.info)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok((decoded.info, stats))
}

/// One frame through the complete chain.
pub fn simulate_frame(
    setup: &ChainSetup,
    det: &DetectorSpec,
    ebn0_db: f64,
    rng: &mut ChaCha8Rng,
) -> Result<FrameStats> {
    let obs = observe_frame(setup, ebn0_db, rng, false)?;
    Ok(decode_frame(setup, det, &obs)?.1)
}
