use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::detect::{
    dd_hard, dd_soft, hosd, max_nodes, msdd_exhaustive, sosd, sosd_observed, stopping_radius,
    DetectorConfig,
};
use crate::metric::{gamma_metric, lambda_metric, AcrMatrix, Hypothesis};

/// Random ACR matrix: with probability 1/2 iid standard normal entries,
/// otherwise `b_l b_i + noise` for random symbols; random noise level.
pub fn random_instance(rng: &mut ChaCha8Rng, block_size: usize) -> AcrMatrix {
    let structured = rng.random_bool(0.5);
    let b: Vec<f64> = (0..=block_size)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let spread = rng.random_range(0.1..1.5);
    let sigma2 = rng.random_range(0.05..2.0);
    AcrMatrix::from_fn(block_size, sigma2, |l, i| {
        let g: f64 = rng.sample(StandardNormal);
        if structured {
            b[l] * b[i] + spread * g
        } else {
            g
        }
    })
    .expect("finite entries")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: usize, total: usize) -> CheckResult {
    CheckResult {
        name,
        passed: failures == 0,
        detail: format!("{} / {total} instances consistent", total - failures),
    }
}

/// Detector consistency checks against the exhaustive search on seeded
/// random instances, `L = 1..=max_block`.
pub fn run_selftest(seed: u64, instances_per_size: usize, max_block: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    for l in 1..=max_block {
        for _ in 0..instances_per_size {
            corpus.push(random_instance(&mut rng, l));
        }
    }
    let n = corpus.len();
    let close = |a: f64, b: f64, tol: f64| (a - b).abs() <= tol * (1.0 + b.abs());
    let mut out = Vec::new();

    let mut bad = 0;
    for z in &corpus {
        let e = msdd_exhaustive(z).expect("small block");
        let s = sosd(z, &DetectorConfig::max_log(z.block_size()));
        if s.llr.iter().zip(&e.llr).any(|(a, b)| (a - b).abs() > 1e-9) {
            bad += 1;
        }
    }
    out.push(check("soft_output_equals_exhaustive", bad, n));

    let mut bad = 0;
    for z in &corpus {
        let e = msdd_exhaustive(z).expect("small block");
        for stopping in [false, true] {
            let h = hosd(
                z,
                &DetectorConfig::new(z.block_size(), 0.0, stopping).unwrap(),
            );
            let tie = h.hard == e.hard || lambda_metric(z, &h.hard) == e.lambda_best;
            if !close(h.lambda_best, e.lambda_best, 1e-12) || !tie {
                bad += 1;
            }
        }
    }
    out.push(check("hard_output_is_optimal", bad, 2 * n));

    let mut bad = 0;
    for z in &corpus {
        let l = z.block_size();
        let h = hosd(z, &DetectorConfig::new(l, 0.0, false).unwrap());
        for llr_max in [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0] {
            let s = sosd(z, &DetectorConfig::new(l, llr_max, false).unwrap());
            if s.llr.iter().any(|v| v.abs() > llr_max) || (llr_max == 0.0 && s.hard != h.hard) {
                bad += 1;
            }
        }
    }
    out.push(check("clipping_bounds_llrs", bad, 8 * n));

    let mut bad = 0;
    for z in &corpus {
        let l = z.block_size();
        for (llr_max, stopping) in [(f64::INFINITY, false), (1.0, true), (0.0, true)] {
            let mut seen = std::collections::HashSet::new();
            let mut dup = false;
            let s = sosd_observed(
                z,
                &DetectorConfig::new(l, llr_max, stopping).unwrap(),
                |d, p| {
                    let key = p.iter().fold(0u64, |acc, &a| acc << 1 | u64::from(a < 0));
                    dup |= !seen.insert((d, key));
                },
            );
            if dup || s.nodes_visited > max_nodes(l) {
                bad += 1;
            }
        }
    }
    out.push(check("node_budget_single_visit", bad, 3 * n));

    let mut bad = 0;
    let singles: Vec<&AcrMatrix> = corpus.iter().filter(|z| z.block_size() == 1).collect();
    for z in &singles {
        let s = sosd(z, &DetectorConfig::max_log(1));
        if !close(s.llr[0], dd_soft(z)[0], 1e-12) || s.hard != dd_hard(z) {
            bad += 1;
        }
    }
    out.push(check("single_symbol_is_dd", bad, singles.len()));

    let z = AcrMatrix::new(2, vec![1.0, -0.5, 2.0], 1.0).unwrap();
    let s = sosd(&z, &DetectorConfig::max_log(2));
    let stop = sosd(&z, &DetectorConfig::new(2, f64::INFINITY, true).unwrap());
    let worked = s.hard == Hypothesis::ones(2)
        && s.lambda_best == 1.0
        && s.lambda_counter == [2.0, 4.0]
        && close(s.llr[0], 1.0 / 3.0, 1e-15)
        && close(s.llr[1], 1.0, 1e-15)
        && stopping_radius(&z) == 1.0
        && stop.terminated_early;
    out.push(CheckResult {
        name: "worked_instance",
        passed: worked,
        detail: format!("llr = {:?}, counters = {:?}", s.llr, s.lambda_counter),
    });

    let mut bad = 0;
    for z in &corpus {
        let a = Hypothesis::from_index(z.block_size(), rng.random());
        let bound = z.sum_abs();
        if (lambda_metric(z, &a) + gamma_metric(z, &a) - bound).abs() > 1e-12 * bound {
            bad += 1;
        }
    }
    out.push(check("metric_identity", bad, n));
    out
}
