use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::frontend::{check_bits, FrontEndConfig, ReceivePulse, SlotVectors};
use super::pulse::PulseFilters;
use crate::error::{Error, Result};
use crate::metric::AcrMatrix;

/// Fast statistical model of the ACR outputs.
///
/// Each slot `j` is summarised by a signal-direction coordinate
/// `b_j sqrt(E_c) + x_j`, `x_j ~ N(0, sigma_n^2 w1)`, and an orthogonal noise
/// vector `u_j` of `dims` iid components. Then
/// `Z_{l,i} = (b_l sqrt(E_c) + x_l)(b_i sqrt(E_c) + x_i) + <u_l, u_i>`
/// has mean `b_l b_i E_c` and variance `2 E_c sigma_n^2 w1 + sigma_n^4 w2`,
/// and entries sharing a slot are correlated as in the waveform receiver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemiAnalyticModel {
    /// Pulse energy inside the integration window.
    pub captured_energy: f64,
    pub sigma_n2: f64,
    /// Signal-times-noise weight.
    pub w1: f64,
    /// Noise-times-noise weight, `2 Ti B_eq`.
    pub w2: f64,
    /// Number of noise-vector components.
    pub dims: usize,
    /// Per-component standard deviation of `u_j`.
    noise_std: f64,
}

impl SemiAnalyticModel {
    pub fn new(pulse: &ReceivePulse, filters: &PulseFilters, cfg: &FrontEndConfig) -> Result<Self> {
        cfg.validate()?;
        let dt = filters.dt();
        let nw = cfg.window_samples(dt);
        let window = &pulse.samples[..nw.min(pulse.samples.len())];
        let captured_energy = pulse.captured_energy(nw);
        if captured_energy.is_nan() || captured_energy <= 0.0 {
            return Err(Error::InvalidInput(
                "no pulse energy inside the integration window".into(),
            ));
        }
        // Var(Delta_t sum s[k] n[k]) / (N0/2) = Delta_t^3 sum_k sum_m s_k s_m r_h[k-m]
        let h = &filters.receive;
        let r_h: Vec<f64> = (0..h.len())
            .map(|tau| h.iter().zip(&h[tau..]).map(|(a, b)| a * b).sum())
            .collect();
        let mut quad = 0.0;
        for (k, &sk) in window.iter().enumerate() {
            let lo = k.saturating_sub(h.len() - 1);
            let hi = (k + h.len()).min(window.len());
            for (m, &sm) in window.iter().enumerate().take(hi).skip(lo) {
                quad += sk * sm * r_h[k.abs_diff(m)];
            }
        }
        let w1 = dt.powi(3) * quad / (captured_energy * filters.noise.rho);
        let w2 = 2.0 * cfg.integration_time_s * filters.noise.b_eq_hz;
        let rest = w2 - w1 * w1;
        if rest.is_nan() || rest <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "integration window too short for the noise model (w2 = {w2})"
            )));
        }
        let dims = rest.round().max(1.0) as usize;
        let sigma_n2 = filters.noise.sigma_n2(cfg.n0());
        Ok(Self {
            captured_energy,
            sigma_n2,
            w1,
            w2,
            dims,
            noise_std: (sigma_n2 * (rest / dims as f64).sqrt()).sqrt(),
        })
    }

    /// Per-entry variance of `Z_{l,i}`.
    pub fn entry_variance(&self) -> f64 {
        2.0 * self.captured_energy * self.sigma_n2 * self.w1 + self.sigma_n2.powi(2) * self.w2
    }

    /// Slot vectors for every symbol of `bits`; `rng = None` is noiseless.
    pub fn observe(&self, bits: &[i8], mut rng: Option<&mut ChaCha8Rng>) -> Result<SlotVectors> {
        check_bits(bits)?;
        let dim = self.dims + 1;
        let amp = self.captured_energy.sqrt();
        let x_std = (self.sigma_n2 * self.w1).sqrt();
        let mut data = Vec::with_capacity(bits.len() * dim);
        for &b in bits {
            let signal = f64::from(b) * amp;
            match rng.as_deref_mut() {
                Some(r) => {
                    data.push(signal + x_std * r.sample::<f64, _>(StandardNormal));
                    data.extend(
                        (0..self.dims).map(|_| self.noise_std * r.sample::<f64, _>(StandardNormal)),
                    );
                }
                None => {
                    data.push(signal);
                    data.extend(std::iter::repeat_n(0.0, self.dims));
                }
            }
        }
        SlotVectors::new(data, dim, 1.0, self.sigma_n2)
    }
}

/// One semi-analytic ACR matrix for `b_0..b_L`.
pub fn semi_analytic_z(
    bits: &[i8],
    model: &SemiAnalyticModel,
    noise_seed: Option<u64>,
) -> Result<AcrMatrix> {
    let mut rng = noise_seed.map(ChaCha8Rng::seed_from_u64);
    model
        .observe(bits, rng.as_mut())?
        .acr_block(0, bits.len() - 1)
}
