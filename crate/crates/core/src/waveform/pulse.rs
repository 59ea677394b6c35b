use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// First derivative of a Gaussian.
    GaussianMonocycle,
}

/// Transmit pulse and sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub center_frequency_hz: f64,
    pub bandwidth_10db_hz: f64,
    pub sample_rate_hz: f64,
    pub shape: PulseShape,
}

impl Default for PulseSpec {
    fn default() -> Self {
        Self {
            center_frequency_hz: 2.25e9,
            bandwidth_10db_hz: 3.3e9,
            sample_rate_hz: 20e9,
            shape: PulseShape::GaussianMonocycle,
        }
    }
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.band_edges();
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidInput(format!(
                "10 dB band [{lo}, {hi}] Hz is empty or reaches DC"
            )));
        }
        if self.sample_rate_hz < 4.0 * hi {
            return Err(Error::InvalidInput(format!(
                "sample rate {} Hz is below 4x the upper band edge {hi} Hz",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Requested lower and upper 10 dB band edges.
    pub fn band_edges(&self) -> (f64, f64) {
        let half = 0.5 * self.bandwidth_10db_hz;
        (
            self.center_frequency_hz - half,
            self.center_frequency_hz + half,
        )
    }

    /// Peak frequency of the monocycle spectrum fitted to the requested band.
    ///
    /// The monocycle's power spectrum is `x^2 e^{1-x^2}` with `x = f / f_peak`,
    /// so its 10 dB edges sit at fixed multiples `x_lo, x_hi` of `f_peak`; the
    /// peak is chosen to minimise the squared error of both edges.
    pub fn monocycle_peak_frequency(&self) -> f64 {
        let (x_lo, x_hi) = monocycle_edge_ratios();
        let (f_lo, f_hi) = self.band_edges();
        (x_lo * f_lo + x_hi * f_hi) / (x_lo * x_lo + x_hi * x_hi)
    }

    /// Sampled transmit pulse, centred and truncated at +-5 time constants.
    pub fn transmit_pulse(&self) -> Vec<f64> {
        match self.shape {
            PulseShape::GaussianMonocycle => {
                let s = 1.0 / (2.0 * PI * self.monocycle_peak_frequency());
                let dt = self.dt();
                let half = (5.0 * s / dt).ceil() as i64;
                (-half..=half)
                    .map(|k| {
                        let t = k as f64 * dt / s;
                        -t * (-0.5 * t * t).exp()
                    })
                    .collect()
            }
        }
    }
}

/// Roots of `x^2 e^{1-x^2} = 0.1` below and above the peak `x = 1`.
fn monocycle_edge_ratios() -> (f64, f64) {
    let g = |x: f64| x * x * (1.0 - x * x).exp() - 0.1;
    (bisect(g, 1e-6, 1.0), bisect(g, 1.0, 10.0))
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `Delta_t sum_k h[k] e^{-j 2 pi f k Delta_t}` evaluated at `f`, returned as `|H(f)|^2`.
pub fn power_response(taps: &[f64], dt: f64, f: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &h) in taps.iter().enumerate() {
        let phase = -2.0 * PI * f * k as f64 * dt;
        re += h * phase.cos();
        im += h * phase.sin();
    }
    dt * dt * (re * re + im * im)
}

const RESPONSE_POINTS: usize = 4096;

/// Second-order noise statistics of the receive filter, from its frequency
/// response on `[0, fs/2]` by rectangular quadrature (unit peak gain).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseStats {
    /// `int_0^inf |H|^2 df`: per-sample noise variance is `N0 * power_bandwidth_hz`.
    pub power_bandwidth_hz: f64,
    /// `(int |H|^2)^2 / int |H|^4`: equivalent noise bandwidth of the
    /// noise-times-noise term; `2 Ti B_eq` is its number of degrees of freedom.
    pub b_eq_hz: f64,
    /// `int |H|^4 / int |H|^2`, so that `sigma_n^2 = rho N0 / 2`.
    pub rho: f64,
}

impl NoiseStats {
    pub fn from_filter(taps: &[f64], dt: f64) -> Self {
        let nyquist = 0.5 / dt;
        let df = nyquist / RESPONSE_POINTS as f64;
        let response: Vec<f64> = (0..RESPONSE_POINTS)
            .map(|m| power_response(taps, dt, (m as f64 + 0.5) * df))
            .collect();
        let peak = response.iter().copied().fold(0.0, f64::max);
        let p2: f64 = response.iter().map(|r| r / peak).sum::<f64>() * df;
        let p4: f64 = response.iter().map(|r| (r / peak).powi(2)).sum::<f64>() * df;
        Self {
            power_bandwidth_hz: p2,
            b_eq_hz: p2 * p2 / p4,
            rho: p4 / p2,
        }
    }

    /// Noise level of the autocorrelation statistics at one-sided density `n0`:
    /// the per-sample variance `N0 B_n` referred to the rate `2 B_eq`.
    pub fn sigma_n2(&self, n0: f64) -> f64 {
        0.5 * self.rho * n0
    }
}

/// Transmit pulse, matched receive filter (unit peak gain) and their
/// convolution, all sampled at `spec.sample_rate_hz`.
#[derive(Clone, Debug)]
pub struct PulseFilters {
    pub spec: PulseSpec,
    pub transmit: Vec<f64>,
    pub receive: Vec<f64>,
    /// `h_RX * p_TX`, the receive pulse of a single unit-gain path.
    pub shaped: Vec<f64>,
    pub noise: NoiseStats,
}

impl PulseFilters {
    pub fn new(spec: PulseSpec) -> Result<Self> {
        spec.validate()?;
        let dt = spec.dt();
        let transmit = spec.transmit_pulse();
        let mut receive: Vec<f64> = transmit.iter().rev().copied().collect();
        let peak = peak_gain(&receive, dt);
        receive.iter_mut().for_each(|h| *h /= peak);
        let shaped = convolve(&receive, &transmit)
            .into_iter()
            .map(|v| v * dt)
            .collect();
        let noise = NoiseStats::from_filter(&receive, dt);
        Ok(Self {
            spec,
            transmit,
            receive,
            shaped,
            noise,
        })
    }

    pub fn dt(&self) -> f64 {
        self.spec.dt()
    }
}

fn peak_gain(taps: &[f64], dt: f64) -> f64 {
    let nyquist = 0.5 / dt;
    let df = nyquist / RESPONSE_POINTS as f64;
    (0..=RESPONSE_POINTS)
        .map(|m| power_response(taps, dt, m as f64 * df))
        .fold(0.0, f64::max)
        .sqrt()
}

pub(crate) fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
