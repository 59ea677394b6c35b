use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use crate::coding::ConvCode;
use crate::detect::{DetectorConfig, EXHAUSTIVE_MAX_BLOCK};
use crate::error::{Error, Result};
use crate::waveform::{ChannelModel, FrontEndConfig, PulseSpec};

/// Detector under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    DdHard,
    DdSoft,
    Hosd,
    Sosd,
    MsddExhaustive,
}

impl DetectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DdHard => "dd_hard",
            Self::DdSoft => "dd_soft",
            Self::Hosd => "hosd",
            Self::Sosd => "sosd",
            Self::MsddExhaustive => "msdd_exhaustive",
        }
    }

    /// Symbol-by-symbol detectors always work on windows of one symbol.
    pub fn is_dd(self) -> bool {
        matches!(self, Self::DdHard | Self::DdSoft)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Source of the ACR statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontEndMode {
    #[serde(alias = "semi")]
    SemiAnalytic,
    Waveform,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingConfig {
    pub symbol_duration_ns: f64,
    pub integration_time_ns: f64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            symbol_duration_ns: 80.0,
            integration_time_ns: 30.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TradeoffConfig {
    pub llr_max_grid: Vec<f64>,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self {
            llr_max_grid: vec![10.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.05],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverallConfig {
    /// Code memory of the DD reference receiver.
    pub nu_ref: u32,
    pub nu_candidates: Vec<u32>,
    /// Clipping levels tried per candidate code; `0` gives the hard-output receiver.
    pub llr_max_grid: Vec<f64>,
}

impl Default for OverallConfig {
    fn default() -> Self {
        Self {
            nu_ref: 7,
            nu_candidates: vec![2, 3, 4, 5, 6],
            llr_max_grid: vec![0.0, 0.1, 0.5, 2.0, 10.0],
        }
    }
}

/// Full description of one experiment. Every field has a default, so a
/// config file only lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub ebn0_grid_db: Vec<f64>,
    /// MSDD block sizes; a single integer is accepted.
    #[serde(rename = "L", deserialize_with = "one_or_many")]
    pub block_sizes: Vec<usize>,
    pub detector: DetectorKind,
    pub llr_max: f64,
    pub stopping: bool,
    pub nu: u32,
    /// Information bits per frame; the interleaver spans the frame's
    /// `2 (info_bits + nu)` code bits.
    pub info_bits: usize,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    pub front_end: FrontEndMode,
    pub target_ber: f64,
    /// End a sweep after the first grid point whose BER is below `target_ber`.
    pub stop_below_target: bool,
    /// Frames simulated between stopping checks; fixed so results do not
    /// depend on the number of worker threads.
    pub frames_per_round: usize,
    pub timing: TimingConfig,
    pub pulse: PulseSpec,
    pub channel: ChannelModel,
    pub tradeoff: TradeoffConfig,
    pub overall: OverallConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            ebn0_grid_db: (0..=24).map(|k| 4.0 + 0.5 * k as f64).collect(),
            block_sizes: vec![10],
            detector: DetectorKind::Sosd,
            llr_max: f64::INFINITY,
            stopping: false,
            nu: 6,
            info_bits: 1000,
            min_bit_errors: 500,
            max_bits: 10_000_000,
            front_end: FrontEndMode::SemiAnalytic,
            target_ber: 1e-3,
            stop_below_target: true,
            frames_per_round: 64,
            timing: TimingConfig::default(),
            pulse: PulseSpec::default(),
            channel: ChannelModel::default(),
            tradeoff: TradeoffConfig::default(),
            overall: OverallConfig::default(),
        }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl ExperimentConfig {
    /// Parses a TOML config, applies `key=value` overrides (dotted keys for
    /// sections, values in TOML syntax or bare strings) and validates.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            Error::config(error_key(text, &e), e.message().to_string())
        })?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let merged = toml::to_string(&table).expect("table serialises");
        let cfg: Self = toml::from_str(&merged)
            .map_err(|e| Error::config(error_key(&merged, &e), e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_grid_db.is_empty() {
            return Err(Error::config("ebn0_grid_db", "grid is empty"));
        }
        if self.ebn0_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("ebn0_grid_db", "values must be finite"));
        }
        if self.ebn0_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "ebn0_grid_db",
                "grid must be strictly increasing",
            ));
        }
        if self.block_sizes.is_empty() {
            return Err(Error::config("L", "no block size given"));
        }
        for &l in &self.block_sizes {
            DetectorConfig::new(l, 0.0, false).map_err(|e| Error::config("L", e.to_string()))?;
            if self.detector == DetectorKind::MsddExhaustive && l > EXHAUSTIVE_MAX_BLOCK {
                return Err(Error::config(
                    "L",
                    format!("msdd_exhaustive supports L <= {EXHAUSTIVE_MAX_BLOCK}"),
                ));
            }
        }
        check_llr("llr_max", self.llr_max)?;
        ConvCode::max_free_distance(self.nu).map_err(|e| Error::config("nu", e.to_string()))?;
        if self.info_bits == 0 {
            return Err(Error::config("info_bits", "must be positive"));
        }
        if self.min_bit_errors < 50 {
            return Err(Error::config("min_bit_errors", "must be at least 50"));
        }
        if self.max_bits < self.info_bits as u64 {
            return Err(Error::config("max_bits", "must cover at least one frame"));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::config("target_ber", "must lie in (0, 0.5)"));
        }
        if self.frames_per_round == 0 {
            return Err(Error::config("frames_per_round", "must be positive"));
        }
        self.pulse
            .validate()
            .map_err(|e| Error::config("pulse", e.to_string()))?;
        self.channel
            .validate()
            .map_err(|e| Error::config("channel", e.to_string()))?;
        self.front_end_config(1, 0.0)
            .validate()
            .map_err(|e| Error::config("timing", e.to_string()))?;
        if self.tradeoff.llr_max_grid.is_empty() {
            return Err(Error::config("tradeoff.llr_max_grid", "grid is empty"));
        }
        for &v in &self.tradeoff.llr_max_grid {
            check_llr("tradeoff.llr_max_grid", v)?;
        }
        ConvCode::max_free_distance(self.overall.nu_ref)
            .map_err(|e| Error::config("overall.nu_ref", e.to_string()))?;
        if self.overall.nu_candidates.is_empty() {
            return Err(Error::config("overall.nu_candidates", "no candidate codes"));
        }
        for &nu in &self.overall.nu_candidates {
            ConvCode::max_free_distance(nu)
                .map_err(|e| Error::config("overall.nu_candidates", e.to_string()))?;
        }
        if self.overall.llr_max_grid.is_empty() {
            return Err(Error::config("overall.llr_max_grid", "grid is empty"));
        }
        for &v in &self.overall.llr_max_grid {
            check_llr("overall.llr_max_grid", v)?;
        }
        Ok(())
    }

    pub fn front_end_config(&self, block_size: usize, ebn0_db: f64) -> FrontEndConfig {
        FrontEndConfig {
            symbol_duration_s: self.timing.symbol_duration_ns * 1e-9,
            integration_time_s: self.timing.integration_time_ns * 1e-9,
            block_size,
            ebn0_db,
        }
    }
}

fn check_llr(key: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::config(
            key,
            format!("clipping level must be >= 0, got {v}"),
        ));
    }
    Ok(())
}

fn apply_override(table: &mut toml::Table, ov: &str) -> Result<()> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| Error::config(ov, "override must have the form key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::config(key, "empty key"))?;
    let mut node = table;
    for part in parts {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a section")))?;
    }
    node.insert(leaf.to_string(), value);
    Ok(())
}

/// Best-effort dotted name of the key a TOML error points at.
fn error_key(text: &str, err: &toml::de::Error) -> String {
    let msg = err.message();
    if let Some(rest) = msg.split("unknown field `").nth(1) {
        if let Some(name) = rest.split('`').next() {
            return with_section(text, err, name);
        }
    }
    let Some(span) = err.span() else {
        return "<config>".into();
    };
    let line_start = text[..span.start].rfind('\n').map_or(0, |p| p + 1);
    let line = text[line_start..].lines().next().unwrap_or("");
    match line.split_once('=') {
        Some((k, _)) => with_section(text, err, k.trim()),
        None => line.trim().trim_matches(['[', ']']).to_string(),
    }
}

fn with_section(text: &str, err: &toml::de::Error, name: &str) -> String {
    let end = err.span().map_or(0, |s| s.start);
    let section = text[..end]
        .lines()
        .rev()
        .find(|l| l.trim_start().starts_with('['))
        .map(|l| l.trim().trim_matches(['[', ']']).to_string());
    match section {
        Some(s) if !s.is_empty() => format!("{s}.{name}"),
        _ => name.to_string(),
    }
}
