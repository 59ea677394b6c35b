use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Writes `rows` as CSV with a header row in field order.
pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text of `rows`, header first.
pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv: {other:?}")),
    }
}

/// Everything needed to regenerate a run's outputs. Carries no timestamps so
/// reruns are byte-identical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// Effective configuration (file plus overrides) in TOML.
    pub config_toml: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &ExperimentConfig, outputs: Vec<String>) -> Self {
        Self {
            tool: "msdd",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: cfg.seed,
            config_toml: cfg.to_toml_string(),
            outputs,
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
