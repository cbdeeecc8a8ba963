//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by encoding, decoding, estimation and ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol} is outside the alphabet [0, {k})")]
    SymbolOutOfAlphabet { symbol: u16, k: u16 },

    #[error("index {index} is out of range for domain of size {n}")]
    IndexOutOfRange { index: u64, n: u64 },

    #[error("malformed distribution: {reason}")]
    BadDistribution { reason: String },

    #[error("invalid privacy configuration: {reason}")]
    BadConfig { reason: String },

    #[error("invalid sparse vector: {reason}")]
    BadVector { reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("entry at index {index} equals the reference value {value}")]
    TrivialEntry { index: u64, value: u16 },

    #[error("dimension mismatch: vector has n={vector_n}, context has n={context_n}")]
    DimensionMismatch { vector_n: u64, context_n: u64 },

    #[error("context mismatch: {reason}")]
    ContextMismatch { reason: String },

    #[error("wire format error: {reason}")]
    WireFormat { reason: String },

    #[error("bitstream underrun while decoding")]
    BitstreamUnderrun,

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
