use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chain::{simulate_frame, ChainSetup, DetectorSpec, FrameStats};
use super::config::{DetectorKind, ExperimentConfig};
use crate::error::Result;

/// One simulated grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub ebn0_db: f64,
    #[serde(rename = "L")]
    pub block_size: usize,
    pub detector: DetectorKind,
    pub llr_max: f64,
    pub stopping: bool,
    pub nu: u32,
    pub ber: f64,
    pub avg_c_sd: f64,
    pub max_c_sd: u64,
    /// `2^nu + avg_c_sd / L`.
    pub c_o_soft: f64,
    /// `2^nu + max_c_sd / L`.
    pub c_o_max: f64,
    pub bits_simulated: u64,
    pub errors_counted: u64,
}

/// Overall per-symbol complexity `2^nu + c_sd / L`.
pub fn overall_complexity(nu: u32, c_sd: f64, block_size: usize) -> f64 {
    (1u64 << nu) as f64 + c_sd / block_size as f64
}

impl ResultRow {
    fn new(ebn0_db: f64, det: &DetectorSpec, nu: u32, s: &FrameStats) -> Self {
        let avg = if s.windows > 0 {
            s.nodes as f64 / s.windows as f64
        } else {
            0.0
        };
        Self {
            ebn0_db,
            block_size: det.block_size,
            detector: det.kind,
            llr_max: det.llr_max,
            stopping: det.stopping,
            nu,
            ber: s.errors as f64 / s.bits as f64,
            avg_c_sd: avg,
            max_c_sd: s.max_nodes,
            c_o_soft: overall_complexity(nu, avg, det.block_size),
            c_o_max: overall_complexity(nu, s.max_nodes as f64, det.block_size),
            bits_simulated: s.bits,
            errors_counted: s.errors,
        }
    }
}

/// Simulates one Eb/N0 point: rounds of `frames_per_round` frames, frame `f`
/// of grid point `p` drawing from stream `p << 32 | f` of the master seed,
/// until `min_bit_errors` or `max_bits` is reached.
pub fn simulate_point(
    setup: &ChainSetup,
    det: &DetectorSpec,
    cfg: &ExperimentConfig,
    point: usize,
    ebn0_db: f64,
) -> Result<FrameStats> {
    let max_frames = cfg.max_bits.div_ceil(setup.info_bits as u64);
    let mut total = FrameStats::default();
    let mut next = 0u64;
    while total.errors < cfg.min_bit_errors && next < max_frames {
        let end = (next + cfg.frames_per_round as u64).min(max_frames);
        let round = (next..end)
            .into_par_iter()
            .map(|frame| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream((point as u64) << 32 | frame);
                simulate_frame(setup, det, ebn0_db, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        round.iter().for_each(|s| total.merge(s));
        next = end;
    }
    Ok(total)
}

/// BER curve of one detector over the configured grid.
pub fn sweep_detector(
    cfg: &ExperimentConfig,
    setup: &ChainSetup,
    det: &DetectorSpec,
) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (p, &ebn0) in cfg.ebn0_grid_db.iter().enumerate() {
        let stats = simulate_point(setup, det, cfg, p, ebn0)?;
        let row = ResultRow::new(ebn0, det, setup.code.nu(), &stats);
        let done = cfg.stop_below_target && row.ber < cfg.target_ber;
        rows.push(row);
        if done {
            break;
        }
    }
    Ok(rows)
}

fn distinct_block_sizes(cfg: &ExperimentConfig, kind: DetectorKind) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &l in &cfg.block_sizes {
        let l = if kind.is_dd() { 1 } else { l };
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// BER versus Eb/N0 for the configured detector at every block size.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let setup = ChainSetup::new(cfg, cfg.nu)?;
    let mut rows = Vec::new();
    for l in distinct_block_sizes(cfg, cfg.detector) {
        let det = DetectorSpec::new(cfg.detector, l, cfg.llr_max, cfg.stopping);
        rows.extend(sweep_detector(cfg, &setup, &det)?);
    }
    Ok(rows)
}

/// Eb/N0 at which a BER curve crosses `target`, by linear interpolation of
/// `log10(BER)` between the first pair of adjacent points bracketing it.
/// A zero BER is floored at one error in the simulated bits. Returns the
/// crossing and the interpolation weight of the upper point.
pub fn required_ebn0(rows: &[ResultRow], target: f64) -> Option<(f64, usize, f64)> {
    let log_ber = |r: &ResultRow| r.ber.max(1.0 / r.bits_simulated as f64).log10();
    let goal = target.log10();
    for (k, pair) in rows.windows(2).enumerate() {
        let (a, b) = (log_ber(&pair[0]), log_ber(&pair[1]));
        if a >= goal && b < goal {
            let w = (a - goal) / (a - b);
            return Some((
                pair[0].ebn0_db + w * (pair[1].ebn0_db - pair[0].ebn0_db),
                k,
                w,
            ));
        }
    }
    None
}

/// Operating point of one curve at the target BER.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetPoint {
    pub required_ebn0_db: f64,
    /// Average nodes per window, interpolated to the required Eb/N0.
    pub avg_c_sd: f64,
    /// Largest node count seen at the two bracketing grid points.
    pub max_c_sd: u64,
}

pub fn target_point(rows: &[ResultRow], target: f64) -> Option<TargetPoint> {
    let (ebn0, k, w) = required_ebn0(rows, target)?;
    Some(TargetPoint {
        required_ebn0_db: ebn0,
        avg_c_sd: (1.0 - w) * rows[k].avg_c_sd + w * rows[k + 1].avg_c_sd,
        max_c_sd: rows[k].max_c_sd.max(rows[k + 1].max_c_sd),
    })
}

/// Performance/complexity operating point for one (L, clipping level).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffRow {
    #[serde(rename = "L")]
    pub block_size: usize,
    pub llr_max: f64,
    pub stopping: bool,
    pub nu: u32,
    /// Empty when the target BER is not crossed inside the grid.
    pub required_ebn0_db: Option<f64>,
    pub avg_c_sd: Option<f64>,
    pub reached: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TradeoffReport {
    pub sweeps: Vec<ResultRow>,
    pub summary: Vec<TradeoffRow>,
}

/// Soft-output sphere decoder at each clipping level of
/// `tradeoff.llr_max_grid` and each block size: required Eb/N0 at the target
/// BER against the average search complexity there.
pub fn run_tradeoff(cfg: &ExperimentConfig) -> Result<TradeoffReport> {
    cfg.validate()?;
    let setup = ChainSetup::new(cfg, cfg.nu)?;
    let mut report = TradeoffReport::default();
    for l in distinct_block_sizes(cfg, DetectorKind::Sosd) {
        for &llr_max in &cfg.tradeoff.llr_max_grid {
            let det = DetectorSpec::new(DetectorKind::Sosd, l, llr_max, cfg.stopping);
            let rows = sweep_detector(cfg, &setup, &det)?;
            let tp = target_point(&rows, cfg.target_ber);
            report.summary.push(TradeoffRow {
                block_size: l,
                llr_max,
                stopping: cfg.stopping,
                nu: cfg.nu,
                required_ebn0_db: tp.as_ref().map(|t| t.required_ebn0_db),
                avg_c_sd: tp.as_ref().map(|t| t.avg_c_sd),
                reached: tp.is_some(),
            });
            report.sweeps.extend(rows);
        }
    }
    Ok(report)
}

/// One receiver setting evaluated for the overall-complexity study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRow {
    #[serde(rename = "L")]
    pub block_size: usize,
    pub detector: DetectorKind,
    pub nu: u32,
    pub llr_max: f64,
    pub required_ebn0_db: Option<f64>,
    pub avg_c_sd: Option<f64>,
    pub max_c_sd: Option<u64>,
    pub c_o_soft: Option<f64>,
    pub c_o_max: Option<f64>,
    /// Target reached and `c_o_soft` within the reference budget.
    pub feasible: bool,
}

/// Selected setting per block size and output type.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverallRow {
    #[serde(rename = "L")]
    pub block_size: usize,
    /// `soft`, `hard` or `reference`.
    pub output: String,
    pub detector: DetectorKind,
    pub nu: Option<u32>,
    pub llr_max: Option<f64>,
    pub required_ebn0_db: Option<f64>,
    pub c_o_soft: Option<f64>,
    pub c_o_max: Option<f64>,
    pub c_o_ref: f64,
    pub infeasible: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OverallReport {
    pub sweeps: Vec<ResultRow>,
    pub candidates: Vec<CandidateRow>,
    pub selected: Vec<OverallRow>,
}

/// `2^nu_ref + 1`, the per-symbol complexity of the DD reference receiver.
pub fn reference_complexity(nu_ref: u32) -> f64 {
    overall_complexity(nu_ref, 1.0, 1)
}

/// Feasible candidate with the smallest required Eb/N0 (first one on ties).
pub fn select_candidate<'a>(
    candidates: impl IntoIterator<Item = &'a CandidateRow>,
    budget: f64,
) -> Option<&'a CandidateRow> {
    candidates
        .into_iter()
        .filter(|c| c.required_ebn0_db.is_some() && c.c_o_soft.is_some_and(|co| co <= budget))
        .fold(None, |best: Option<&CandidateRow>, c| match best {
            Some(b) if b.required_ebn0_db <= c.required_ebn0_db => Some(b),
            _ => Some(c),
        })
}

fn candidate(
    det: &DetectorSpec,
    nu: u32,
    rows: &[ResultRow],
    target: f64,
    budget: f64,
) -> CandidateRow {
    let tp = target_point(rows, target);
    let l = det.block_size;
    let c_o_soft = tp.as_ref().map(|t| overall_complexity(nu, t.avg_c_sd, l));
    CandidateRow {
        block_size: l,
        detector: det.kind,
        nu,
        llr_max: det.llr_max,
        required_ebn0_db: tp.as_ref().map(|t| t.required_ebn0_db),
        avg_c_sd: tp.as_ref().map(|t| t.avg_c_sd),
        max_c_sd: tp.as_ref().map(|t| t.max_c_sd),
        c_o_soft,
        c_o_max: tp
            .as_ref()
            .map(|t| overall_complexity(nu, t.max_c_sd as f64, l)),
        feasible: c_o_soft.is_some_and(|c| c <= budget),
    }
}

/// For every block size, the (code, clipping level) with the lowest required
/// Eb/N0 whose average overall complexity does not exceed that of a soft DD
/// receiver with code memory `nu_ref`; soft- and hard-output receivers are
/// selected separately. For `L = 1` the candidates are the DD detectors.
pub fn run_overall_complexity(cfg: &ExperimentConfig, nu_ref: u32) -> Result<OverallReport> {
    cfg.validate()?;
    let budget = reference_complexity(nu_ref);
    let mut report = OverallReport::default();

    let ref_setup = ChainSetup::new(cfg, nu_ref)?;
    let ref_det = DetectorSpec::new(DetectorKind::DdSoft, 1, f64::INFINITY, false);
    let ref_rows = sweep_detector(cfg, &ref_setup, &ref_det)?;
    let reference = candidate(&ref_det, nu_ref, &ref_rows, cfg.target_ber, budget);
    report.selected.push(OverallRow {
        block_size: 1,
        output: "reference".into(),
        detector: DetectorKind::DdSoft,
        nu: Some(nu_ref),
        llr_max: None,
        required_ebn0_db: reference.required_ebn0_db,
        c_o_soft: Some(budget),
        c_o_max: Some(budget),
        c_o_ref: budget,
        infeasible: reference.required_ebn0_db.is_none(),
    });
    report.sweeps.extend(ref_rows);

    let mut setups = Vec::new();
    for &nu in &cfg.overall.nu_candidates {
        setups.push((nu, ChainSetup::new(cfg, nu)?));
    }
    for l in distinct_block_sizes(cfg, DetectorKind::Sosd) {
        let first = report.candidates.len();
        for (nu, setup) in &setups {
            for &llr_max in &cfg.overall.llr_max_grid {
                let kind = match (l, llr_max > 0.0) {
                    (1, true) => DetectorKind::DdSoft,
                    (1, false) => DetectorKind::DdHard,
                    _ => DetectorKind::Sosd,
                };
                if l == 1
                    && report.candidates[first..]
                        .iter()
                        .any(|c| c.nu == *nu && c.detector == kind)
                {
                    continue; // DD has no clipping level
                }
                let det = DetectorSpec::new(kind, l, llr_max, cfg.stopping);
                let rows = sweep_detector(cfg, setup, &det)?;
                report
                    .candidates
                    .push(candidate(&det, *nu, &rows, cfg.target_ber, budget));
                report.sweeps.extend(rows);
            }
        }
        for output in ["soft", "hard"] {
            let pool = report.candidates[first..]
                .iter()
                .filter(|c| (c.llr_max > 0.0) == (output == "soft"));
            let row = match select_candidate(pool, budget) {
                Some(c) => OverallRow {
                    block_size: l,
                    output: output.into(),
                    detector: c.detector,
                    nu: Some(c.nu),
                    llr_max: Some(c.llr_max),
                    required_ebn0_db: c.required_ebn0_db,
                    c_o_soft: c.c_o_soft,
                    c_o_max: c.c_o_max,
                    c_o_ref: budget,
                    infeasible: false,
                },
                None => OverallRow {
                    block_size: l,
                    output: output.into(),
                    detector: if l == 1 {
                        DetectorKind::DdSoft
                    } else {
                        DetectorKind::Sosd
                    },
                    nu: None,
                    llr_max: None,
                    required_ebn0_db: None,
                    c_o_soft: None,
                    c_o_max: None,
                    c_o_ref: budget,
                    infeasible: true,
                },
            };
            report.selected.push(row);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ebn0: f64, ber: f64, bits: u64, avg: f64) -> ResultRow {
        ResultRow {
            ebn0_db: ebn0,
            block_size: 2,
            detector: DetectorKind::Sosd,
            llr_max: 1.0,
            stopping: false,
            nu: 2,
            ber,
            avg_c_sd: avg,
            max_c_sd: 6,
            c_o_soft: 0.0,
            c_o_max: 0.0,
            bits_simulated: bits,
            errors_counted: (ber * bits as f64) as u64,
        }
    }

    #[test]
    fn interpolation_is_log_linear() {
        let rows = [row(0.0, 1e-2, 10_000, 4.0), row(1.0, 1e-4, 1_000_000, 2.0)];
        let (x, k, w) = required_ebn0(&rows, 1e-3).unwrap();
        assert!((x - 0.5).abs() < 1e-12);
        assert_eq!((k, w), (0, 0.5));
        let tp = target_point(&rows, 1e-3).unwrap();
        assert!((tp.avg_c_sd - 3.0).abs() < 1e-12);
        assert!(required_ebn0(&rows, 1e-5).is_none());
        assert!(required_ebn0(&rows, 0.1).is_none());
    }

    #[test]
    fn zero_ber_is_floored() {
        let rows = [row(0.0, 1e-2, 1000, 1.0), row(1.0, 0.0, 10_000, 1.0)];
        // floor 1e-4: crossing of 1e-3 at 1/2
        let (x, _, _) = required_ebn0(&rows, 1e-3).unwrap();
        assert!((x - 0.5).abs() < 1e-12);
    }

    fn cand(nu: u32, req: Option<f64>, co: f64) -> CandidateRow {
        CandidateRow {
            block_size: 4,
            detector: DetectorKind::Sosd,
            nu,
            llr_max: 1.0,
            required_ebn0_db: req,
            avg_c_sd: None,
            max_c_sd: None,
            c_o_soft: req.map(|_| co),
            c_o_max: None,
            feasible: false,
        }
    }

    #[test]
    fn selection_respects_budget() {
        let budget = reference_complexity(7);
        assert_eq!(budget, 129.0);
        let c = [
            cand(6, Some(5.0), 130.0),
            cand(5, Some(6.0), 129.0),
            cand(4, Some(5.5), 40.0),
            cand(3, None, 10.0),
        ];
        assert_eq!(select_candidate(&c, budget).unwrap().nu, 4);
        assert!(select_candidate(&c[..1], budget).is_none());
        assert!(select_candidate(&c[3..], budget).is_none());
    }

    #[test]
    fn overall_complexity_formula() {
        assert_eq!(overall_complexity(7, 1.0, 1), 129.0);
        assert_eq!(overall_complexity(4, 2046.0, 10), 16.0 + 204.6);
    }
}
