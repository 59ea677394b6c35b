use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One multipath component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tap {
    pub delay_s: f64,
    pub gain: f64,
}

/// A multipath channel impulse response `h(t) = sum_k g_k delta(t - tau_k)`.
///
/// Gains are normalised to `sum g_k^2 = 1`; the composite receive pulse is
/// renormalised to unit energy separately by [`super::make_receive_pulse`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    taps: Vec<Tap>,
    pub rng_seed: u64,
}

impl ChannelRealization {
    /// Validates, sorts by delay and normalises the gains.
    pub fn new(mut taps: Vec<Tap>, rng_seed: u64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidInput("channel has no taps".into()));
        }
        for (k, t) in taps.iter().enumerate() {
            if !(t.delay_s.is_finite() && t.delay_s >= 0.0 && t.gain.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "tap {k} has invalid delay {} s or gain {}",
                    t.delay_s, t.gain
                )));
            }
        }
        let energy: f64 = taps.iter().map(|t| t.gain * t.gain).sum();
        if energy <= 0.0 {
            return Err(Error::InvalidInput("channel has zero energy".into()));
        }
        let scale = energy.sqrt().recip();
        taps.iter_mut().for_each(|t| t.gain *= scale);
        taps.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
        Ok(Self { taps, rng_seed })
    }

    /// Single unit-gain path at zero delay.
    pub fn single_path() -> Self {
        Self {
            taps: vec![Tap {
                delay_s: 0.0,
                gain: 1.0,
            }],
            rng_seed: 0,
        }
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    /// Delay of the last tap.
    pub fn max_delay_s(&self) -> f64 {
        self.taps.last().map_or(0.0, |t| t.delay_s)
    }

    pub fn to_toml_string(&self) -> String {
        let file = ChannelFile {
            rng_seed: self.rng_seed,
            taps: self
                .taps
                .iter()
                .map(|t| TapRecord {
                    delay_ns: t.delay_s * 1e9,
                    gain: t.gain,
                })
                .collect(),
        };
        toml::to_string(&file).expect("channel serialises to TOML")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ChannelFile =
            toml::from_str(text).map_err(|e| Error::ChannelFile(e.to_string()))?;
        let taps = file
            .taps
            .into_iter()
            .map(|t| Tap {
                delay_s: t.delay_ns * 1e-9,
                gain: t.gain,
            })
            .collect();
        Self::new(taps, file.rng_seed)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    rng_seed: u64,
    taps: Vec<TapRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TapRecord {
    delay_ns: f64,
    gain: f64,
}

/// Saleh–Valenzuela cluster model: Poisson cluster and ray arrivals,
/// double-exponential power decay, lognormal amplitude fading and random
/// polarity. Defaults approximate the IEEE 802.15.3a CM2 (NLOS, 0–4 m)
/// parameter set; it is not a bit-exact CM2 implementation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvParams {
    pub cluster_rate_per_ns: f64,
    pub ray_rate_per_ns: f64,
    pub cluster_decay_ns: f64,
    pub ray_decay_ns: f64,
    pub cluster_fading_db: f64,
    pub ray_fading_db: f64,
    /// Rays arriving later than this are dropped.
    pub max_delay_ns: f64,
}

impl Default for SvParams {
    fn default() -> Self {
        Self {
            cluster_rate_per_ns: 0.4,
            ray_rate_per_ns: 0.5,
            cluster_decay_ns: 7.1,
            ray_decay_ns: 4.3,
            cluster_fading_db: 3.3,
            ray_fading_db: 3.3,
            max_delay_ns: 60.0,
        }
    }
}

impl SvParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cluster_rate_per_ns", self.cluster_rate_per_ns),
            ("ray_rate_per_ns", self.ray_rate_per_ns),
            ("cluster_decay_ns", self.cluster_decay_ns),
            ("ray_decay_ns", self.ray_decay_ns),
            ("max_delay_ns", self.max_delay_ns),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("cluster_fading_db", self.cluster_fading_db),
            ("ray_fading_db", self.ray_fading_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Draws one realization; the first cluster and its first ray arrive at 0.
    pub fn realize(&self, seed: u64) -> Result<ChannelRealization> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cluster_gap = Exp::new(self.cluster_rate_per_ns).expect("validated rate");
        let ray_gap = Exp::new(self.ray_rate_per_ns).expect("validated rate");
        let fade_cluster = Normal::new(0.0, self.cluster_fading_db).expect("validated");
        let fade_ray = Normal::new(0.0, self.ray_fading_db).expect("validated");

        let mut taps = Vec::new();
        let mut cluster = 0.0;
        while cluster <= self.max_delay_ns {
            let cluster_db = fade_cluster.sample(&mut rng);
            let mut ray = 0.0;
            while cluster + ray <= self.max_delay_ns {
                let power = (-cluster / self.cluster_decay_ns - ray / self.ray_decay_ns).exp();
                let fade_db = cluster_db + fade_ray.sample(&mut rng);
                let polarity = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                taps.push(Tap {
                    delay_s: (cluster + ray) * 1e-9,
                    gain: polarity * power.sqrt() * 10f64.powf(fade_db / 20.0),
                });
                ray += ray_gap.sample(&mut rng);
            }
            cluster += cluster_gap.sample(&mut rng);
        }
        ChannelRealization::new(taps, seed)
    }
}

/// Channel used for a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ChannelModel {
    /// Single unit-gain path.
    SinglePath,
    SalehValenzuela(SvParams),
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self::SalehValenzuela(SvParams::default())
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SinglePath => Ok(()),
            Self::SalehValenzuela(p) => p.validate(),
        }
    }

    pub fn realize(&self, seed: u64) -> Result<ChannelRealization> {
        match self {
            Self::SinglePath => Ok(ChannelRealization::single_path()),
            Self::SalehValenzuela(p) => p.realize(seed),
        }
    }
}
