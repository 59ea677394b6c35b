//! Receive-signal synthesis, the ACR front-end and the semi-analytic model.

use msdd_core::waveform::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn filters() -> PulseFilters {
    PulseFilters::new(PulseSpec::default()).unwrap()
}

fn cfg(block_size: usize, ebn0_db: f64) -> FrontEndConfig {
    FrontEndConfig {
        block_size,
        ebn0_db,
        ..FrontEndConfig::default()
    }
}

fn two_clusters() -> ChannelRealization {
    ChannelRealization::new(
        vec![
            Tap {
                delay_s: 0.0,
                gain: 1.0,
            },
            Tap {
                delay_s: 20e-9,
                gain: 1.0,
            },
        ],
        0,
    )
    .unwrap()
}

#[test]
fn single_path_pulse_is_normalised_autocorrelation() {
    let f = filters();
    let p = make_receive_pulse(&f, &ChannelRealization::single_path(), 80e-9).unwrap();
    assert!((p.energy() - 1.0).abs() < 1e-9);
    // matched filtering of an odd pulse gives an even pulse with its peak in the middle
    let n = p.samples.len();
    let peak = p.samples.iter().copied().fold(f64::MIN, f64::max);
    assert_eq!(p.samples[n / 2], peak);
    for k in 0..n {
        assert!((p.samples[k] - p.samples[n - 1 - k]).abs() < 1e-12 * peak);
    }
}

#[test]
fn two_taps_give_two_clusters() {
    let f = filters();
    let p = make_receive_pulse(&f, &two_clusters(), 80e-9).unwrap();
    assert!((p.energy() - 1.0).abs() < 1e-9);
    let gap = (20e-9 / p.dt).round() as usize;
    for k in 0..f.shaped.len() {
        assert!((p.samples[k] - p.samples[k + gap]).abs() < 1e-9);
    }
    assert!(p.samples[f.shaped.len() + 5..gap].iter().all(|&x| x == 0.0));
}

#[test]
fn degenerate_channels_are_rejected() {
    assert!(ChannelRealization::new(vec![], 0).is_err());
    let f = filters();
    let late = ChannelRealization::new(
        vec![Tap {
            delay_s: 79.5e-9,
            gain: 1.0,
        }],
        0,
    )
    .unwrap();
    assert!(matches!(
        make_receive_pulse(&f, &late, 80e-9),
        Err(msdd_core::Error::PulseTooLong { .. })
    ));
}

#[test]
fn cm2_like_pulses_have_unit_energy() {
    let f = filters();
    for seed in 0..50 {
        let ch = SvParams::default().realize(seed).unwrap();
        let p = make_receive_pulse(&f, &ch, 80e-9).unwrap();
        assert!((p.energy() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn noiseless_copies() {
    let f = filters();
    let p = make_receive_pulse(&f, &ChannelRealization::single_path(), 80e-9).unwrap();
    let c = cfg(1, 10.0);
    let ns = c.samples_per_symbol(f.dt());
    let same = synthesize_block(&[1, 1], &p, &f, &c, None).unwrap();
    assert_eq!(same.samples.len(), 2 * ns);
    assert_eq!(same.samples[..ns], same.samples[ns..]);
    let flip = synthesize_block(&[1, -1], &p, &f, &c, None).unwrap();
    for k in 0..ns {
        assert_eq!(flip.samples[k], -flip.samples[k + ns]);
    }
}

#[test]
fn noisy_waveforms_are_reproducible() {
    let f = filters();
    let p = make_receive_pulse(&f, &SvParams::default().realize(1).unwrap(), 80e-9).unwrap();
    let c = cfg(3, 6.0);
    let bits = [1, -1, -1, 1];
    let a = synthesize_block(&bits, &p, &f, &c, Some(42)).unwrap();
    let b = synthesize_block(&bits, &p, &f, &c, Some(42)).unwrap();
    let d = synthesize_block(&bits, &p, &f, &c, Some(43)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, d);
    assert_eq!(
        acr_front_end(&a, &c).unwrap(),
        acr_front_end(&b, &c).unwrap()
    );
    let m = SemiAnalyticModel::new(&p, &f, &c).unwrap();
    assert_eq!(
        semi_analytic_z(&bits, &m, Some(7)).unwrap(),
        semi_analytic_z(&bits, &m, Some(7)).unwrap()
    );
}

#[test]
fn noiseless_acr_is_exact() {
    let f = filters();
    let p = make_receive_pulse(&f, &ChannelRealization::single_path(), 80e-9).unwrap();
    let c = cfg(4, 10.0);
    let bits = [1, -1, 1, 1, -1];
    let z = acr_front_end(&synthesize_block(&bits, &p, &f, &c, None).unwrap(), &c).unwrap();
    for i in 1..=4 {
        for l in 0..i {
            let want = f64::from(bits[l] * bits[i]);
            assert!((z.get(l, i) - want).abs() < 1e-9);
        }
    }
    assert!((z.sigma_n2() - f.noise.sigma_n2(c.n0())).abs() < 1e-15);
}

#[test]
fn short_window_captures_a_fraction() {
    // Two identical, non-overlapping clusters of half the energy each; a 10 ns
    // window only sees the first one.
    let f = filters();
    let p = make_receive_pulse(&f, &two_clusters(), 80e-9).unwrap();
    let c = FrontEndConfig {
        integration_time_s: 10e-9,
        ..cfg(1, 10.0)
    };
    let z = acr_front_end(&synthesize_block(&[1, -1], &p, &f, &c, None).unwrap(), &c).unwrap();
    assert!((z.get(0, 1) + 0.5).abs() < 1e-9);
    let m = SemiAnalyticModel::new(&p, &f, &c).unwrap();
    assert!((m.captured_energy - 0.5).abs() < 1e-9);
}

#[test]
fn pure_noise_acr_has_zero_mean() {
    let f = filters();
    let silent = ReceivePulse {
        samples: vec![0.0],
        dt: f.dt(),
    };
    let c = cfg(2, 0.0);
    let trials = 4000;
    let mut sums = [0.0; 3];
    let mut sq = [0.0; 3];
    for t in 0..trials {
        let r = synthesize_block(&[1, 1, 1], &silent, &f, &c, Some(t)).unwrap();
        let z = acr_front_end(&r, &c).unwrap();
        for (k, v) in z.entries().iter().enumerate() {
            sums[k] += v;
            sq[k] += v * v;
        }
    }
    for k in 0..3 {
        let mean = sums[k] / trials as f64;
        let se = (sq[k] / trials as f64 - mean * mean).sqrt() / (trials as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "entry {k}: mean {mean}, se {se}");
    }
}

#[test]
fn semi_analytic_noiseless_and_mean() {
    let f = filters();
    let p = make_receive_pulse(&f, &SvParams::default().realize(3).unwrap(), 80e-9).unwrap();
    let c = cfg(2, 8.0);
    let m = SemiAnalyticModel::new(&p, &f, &c).unwrap();
    let bits = [1, -1, -1];
    let z = semi_analytic_z(&bits, &m, None).unwrap();
    for i in 1..=2 {
        for l in 0..i {
            let want = f64::from(bits[l] * bits[i]) * m.captured_energy;
            assert!((z.get(l, i) - want).abs() < 1e-12);
        }
    }
    let trials = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let v = m
            .observe(&bits[..2], Some(&mut rng))
            .unwrap()
            .acr_block(0, 1)
            .unwrap()
            .get(0, 1);
        s += v;
        s2 += v * v;
    }
    let mean = s / trials as f64;
    let var = s2 / trials as f64 - mean * mean;
    let se = (var / trials as f64).sqrt();
    assert!((mean + m.captured_energy).abs() < 3.0 * se);
    assert!((var / m.entry_variance() - 1.0).abs() < 0.02);
}

struct Moments {
    n: f64,
    sum: Vec<f64>,
    cross: Vec<Vec<f64>>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Self {
            n: 0.0,
            sum: vec![0.0; k],
            cross: vec![vec![0.0; k]; k],
        }
    }
    fn push(&mut self, v: &[f64]) {
        self.n += 1.0;
        for a in 0..v.len() {
            self.sum[a] += v[a];
            for b in 0..v.len() {
                self.cross[a][b] += v[a] * v[b];
            }
        }
    }
    fn mean(&self, a: usize) -> f64 {
        self.sum[a] / self.n
    }
    fn cov(&self, a: usize, b: usize) -> f64 {
        self.cross[a][b] / self.n - self.mean(a) * self.mean(b)
    }
}

/// Per-entry mean and variance of the semi-analytic generator against the
/// sampled-waveform receiver at matched Eb/N0, channel and Ti.
#[test]
fn semi_analytic_matches_waveform_statistics() {
    let f = filters();
    let blocks = 20_000u64;
    for (ch_seed, ebn0) in [(2u64, 10.0), (4, 4.0)] {
        let p =
            make_receive_pulse(&f, &SvParams::default().realize(ch_seed).unwrap(), 80e-9).unwrap();
        let c = cfg(2, ebn0);
        let bits = [1, -1, 1];
        let model = SemiAnalyticModel::new(&p, &f, &c).unwrap();
        let mut wave = Moments::new(3);
        let mut semi = Moments::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(ch_seed);
        for t in 0..blocks {
            let r = synthesize_block(&bits, &p, &f, &c, Some(1_000_000 + t)).unwrap();
            wave.push(acr_front_end(&r, &c).unwrap().entries());
            semi.push(
                model
                    .observe(&bits, Some(&mut rng))
                    .unwrap()
                    .acr_block(0, 2)
                    .unwrap()
                    .entries(),
            );
        }
        for k in 0..3 {
            let (mw, ms) = (wave.mean(k), semi.mean(k));
            let (vw, vs) = (wave.cov(k, k), semi.cov(k, k));
            assert!(
                (ms / mw - 1.0).abs() < 0.05,
                "Eb/N0 {ebn0} entry {k}: mean {ms} vs {mw}"
            );
            assert!(
                (vs / vw - 1.0).abs() < 0.05,
                "Eb/N0 {ebn0} entry {k}: var {vs} vs {vw}"
            );
            assert!((model.entry_variance() / vw - 1.0).abs() < 0.05);
        }
        // entries sharing a slot are correlated alike
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let rw = wave.cov(a, b) / (wave.cov(a, a) * wave.cov(b, b)).sqrt();
            let rs = semi.cov(a, b) / (semi.cov(a, a) * semi.cov(b, b)).sqrt();
            assert!((rw - rs).abs() < 0.04, "corr ({a},{b}): {rs} vs {rw}");
        }
    }
}

#[test]
fn window_observation_matches_full_waveform_without_noise() {
    let f = filters();
    let p = make_receive_pulse(&f, &SvParams::default().realize(8).unwrap(), 80e-9).unwrap();
    let c = cfg(3, 10.0);
    let bits = [1, 1, -1, 1];
    let full = acr_front_end(&synthesize_block(&bits, &p, &f, &c, None).unwrap(), &c).unwrap();
    let win = observe_windows(&bits, &p, &f, &c, None)
        .unwrap()
        .acr_block(0, 3)
        .unwrap();
    assert_eq!(full, win);
}
