use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::channel::ChannelRealization;
use super::pulse::PulseFilters;
use crate::error::{Error, Result};
use crate::metric::AcrMatrix;

/// Composite receive pulse `p = h_CH * h_RX * p_TX`, unit energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivePulse {
    pub samples: Vec<f64>,
    pub dt: f64,
}

impl ReceivePulse {
    /// `Delta_t sum p[k]^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|p| p * p).sum::<f64>() * self.dt
    }

    /// Energy inside the first `window` samples, `E_c`.
    pub fn captured_energy(&self, window: usize) -> f64 {
        self.samples.iter().take(window).map(|p| p * p).sum::<f64>() * self.dt
    }

    pub fn support_s(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

/// Places a copy of the shaped pulse at every tap (delay rounded to the
/// sample grid) and normalises the sum to unit energy.
pub fn make_receive_pulse(
    filters: &PulseFilters,
    channel: &ChannelRealization,
    symbol_duration_s: f64,
) -> Result<ReceivePulse> {
    let dt = filters.dt();
    let taps = channel.taps();
    if taps.is_empty() {
        return Err(Error::InvalidInput("channel has no taps".into()));
    }
    let offsets: Vec<usize> = taps
        .iter()
        .map(|t| (t.delay_s / dt).round() as usize)
        .collect();
    let len = offsets.iter().max().copied().unwrap_or(0) + filters.shaped.len();
    let support = len as f64 * dt;
    if support > symbol_duration_s {
        return Err(Error::PulseTooLong {
            support_ns: support * 1e9,
            symbol_ns: symbol_duration_s * 1e9,
        });
    }
    let mut samples = vec![0.0; len];
    for (tap, &off) in taps.iter().zip(&offsets) {
        for (k, &s) in filters.shaped.iter().enumerate() {
            samples[off + k] += tap.gain * s;
        }
    }
    let energy = samples.iter().map(|p| p * p).sum::<f64>() * dt;
    if energy.is_nan() || energy <= 0.0 {
        return Err(Error::InvalidInput(
            "multipath components cancel out".into(),
        ));
    }
    let scale = energy.sqrt().recip();
    samples.iter_mut().for_each(|p| *p *= scale);
    Ok(ReceivePulse { samples, dt })
}

/// Autocorrelation-receiver timing and operating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontEndConfig {
    pub symbol_duration_s: f64,
    pub integration_time_s: f64,
    pub block_size: usize,
    pub ebn0_db: f64,
}

impl Default for FrontEndConfig {
    fn default() -> Self {
        Self {
            symbol_duration_s: 80e-9,
            integration_time_s: 30e-9,
            block_size: 1,
            ebn0_db: 10.0,
        }
    }
}

impl FrontEndConfig {
    pub fn validate(&self) -> Result<()> {
        let (t, ti) = (self.symbol_duration_s, self.integration_time_s);
        if !(t.is_finite() && ti.is_finite() && ti > 0.0 && ti <= t) {
            return Err(Error::InvalidInput(format!(
                "need 0 < Ti <= T, got Ti = {ti} s, T = {t} s"
            )));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidInput(
                "block size L must be at least 1".into(),
            ));
        }
        if !self.ebn0_db.is_finite() {
            return Err(Error::InvalidInput("Eb/N0 must be finite".into()));
        }
        Ok(())
    }

    /// One-sided noise density for `Eb = 1` per channel symbol.
    pub fn n0(&self) -> f64 {
        10f64.powf(-self.ebn0_db / 10.0)
    }

    pub fn samples_per_symbol(&self, dt: f64) -> usize {
        (self.symbol_duration_s / dt).round() as usize
    }

    pub fn window_samples(&self, dt: f64) -> usize {
        (self.integration_time_s / dt).round() as usize
    }
}

/// Sampled receive signal `r[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub dt: f64,
    /// Noise level of the ACR statistics at this operating point.
    pub sigma_n2: f64,
}

/// Coloured receiver noise: white samples of variance `(N0/2)/Delta_t`
/// through the receive filter `h_RX Delta_t`; returns `len` samples.
fn filtered_noise(filters: &PulseFilters, n0: f64, len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let dt = filters.dt();
    let h = &filters.receive;
    let std = (0.5 * n0 / dt).sqrt();
    let white: Vec<f64> = (0..len + h.len() - 1)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    (0..len)
        .map(|k| {
            // output k uses white[k .. k + len(h)], newest sample last
            h.iter()
                .enumerate()
                .map(|(j, &hj)| hj * white[k + h.len() - 1 - j])
                .sum::<f64>()
                * dt
        })
        .collect()
}

/// `r[k] = sum_i b_i p[k - i T/Delta_t] + n[k]` on `[0, (L+1)T)`; `noise_seed = None`
/// gives the noiseless signal.
pub fn synthesize_block(
    bits: &[i8],
    pulse: &ReceivePulse,
    filters: &PulseFilters,
    cfg: &FrontEndConfig,
    noise_seed: Option<u64>,
) -> Result<Waveform> {
    cfg.validate()?;
    check_bits(bits)?;
    let dt = filters.dt();
    let ns = cfg.samples_per_symbol(dt);
    if pulse.samples.len() > ns {
        return Err(Error::PulseTooLong {
            support_ns: pulse.support_s() * 1e9,
            symbol_ns: cfg.symbol_duration_s * 1e9,
        });
    }
    let mut samples = match noise_seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            filtered_noise(filters, cfg.n0(), bits.len() * ns, &mut rng)
        }
        None => vec![0.0; bits.len() * ns],
    };
    for (i, &b) in bits.iter().enumerate() {
        for (k, &p) in pulse.samples.iter().enumerate() {
            samples[i * ns + k] += f64::from(b) * p;
        }
    }
    Ok(Waveform {
        samples,
        dt,
        sigma_n2: filters.noise.sigma_n2(cfg.n0()),
    })
}

/// L-branch autocorrelation receiver:
/// `Z_{l,i} = Delta_t sum_{k < Ti/Delta_t} r[k + iT/Delta_t] r[k + lT/Delta_t]`.
pub fn acr_front_end(r: &Waveform, cfg: &FrontEndConfig) -> Result<AcrMatrix> {
    cfg.validate()?;
    let ns = cfg.samples_per_symbol(r.dt);
    let nw = cfg.window_samples(r.dt);
    let slots = cfg.block_size + 1;
    if r.samples.len() < slots * ns {
        return Err(Error::LengthMismatch {
            expected: slots * ns,
            actual: r.samples.len(),
        });
    }
    let mut data = Vec::with_capacity(slots * nw);
    for j in 0..slots {
        data.extend_from_slice(&r.samples[j * ns..j * ns + nw]);
    }
    SlotVectors::new(data, nw, r.dt, r.sigma_n2)?.acr_block(0, cfg.block_size)
}

pub(crate) fn check_bits(bits: &[i8]) -> Result<()> {
    if bits.len() < 2 {
        return Err(Error::InvalidInput("need at least b_0 and b_1".into()));
    }
    if let Some(k) = bits.iter().position(|&b| b != 1 && b != -1) {
        return Err(Error::InvalidInput(format!(
            "b_{k} = {} is not antipodal",
            bits[k]
        )));
    }
    Ok(())
}

/// Per-slot observation vectors whose scaled inner products are the ACR
/// statistics, `Z_{l,i} = scale <v_l, v_i>`. Both front-ends produce this
/// form, so a whole frame can be observed once and cut into MSDD windows.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotVectors {
    data: Vec<f64>,
    dim: usize,
    scale: f64,
    sigma_n2: f64,
}

impl SlotVectors {
    pub fn new(data: Vec<f64>, dim: usize, scale: f64, sigma_n2: f64) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} values do not split into slots of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self {
            data,
            dim,
            scale,
            sigma_n2,
        })
    }

    pub fn num_slots(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn slot(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    /// ACR matrix of the window of slots `start ..= start + len`.
    pub fn acr_block(&self, start: usize, len: usize) -> Result<AcrMatrix> {
        if start + len >= self.num_slots() {
            return Err(Error::LengthMismatch {
                expected: start + len + 1,
                actual: self.num_slots(),
            });
        }
        AcrMatrix::from_fn(len, self.sigma_n2, |l, i| {
            let (a, b) = (self.slot(start + l), self.slot(start + i));
            self.scale * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
        })
    }
}

/// Observes the integration windows of every slot of `bits` through the
/// waveform model; `rng = None` gives noiseless windows.
pub fn observe_windows(
    bits: &[i8],
    pulse: &ReceivePulse,
    filters: &PulseFilters,
    cfg: &FrontEndConfig,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<SlotVectors> {
    cfg.validate()?;
    check_bits(bits)?;
    let dt = filters.dt();
    let nw = cfg.window_samples(dt);
    let mut data = Vec::with_capacity(bits.len() * nw);
    for &b in bits {
        let start = data.len();
        match rng.as_deref_mut() {
            Some(r) => data.extend(filtered_noise(filters, cfg.n0(), nw, r)),
            None => data.resize(start + nw, 0.0),
        }
        for (k, &p) in pulse.samples.iter().take(nw).enumerate() {
            data[start + k] += f64::from(b) * p;
        }
    }
    SlotVectors::new(data, nw, dt, filters.noise.sigma_n2(cfg.n0()))
}
