use thiserror::Error;

/// Errors raised by the detection, waveform, coding and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("block size {block_size} exceeds the exhaustive-search limit of {limit}")]
    BlockTooLarge { block_size: usize, limit: usize },
    #[error(
        "receive pulse support {support_ns:.3} ns exceeds the symbol duration {symbol_ns:.3} ns"
    )]
    PulseTooLong { support_ns: f64, symbol_ns: f64 },
    #[error("detector produced a non-finite LLR at coded bit {0}")]
    NonFiniteLlr(usize),
    /// Invalid experiment configuration; `key` names the offending entry.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("channel file: {0}")]
    ChannelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
