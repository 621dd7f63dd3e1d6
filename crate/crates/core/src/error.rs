use thiserror::Error;

/// Errors produced by the decomposition and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Raised by filter-length estimation when the signal is already a trend.
    #[error("signal has {extrema} extrema; at least 2 are needed to estimate a filter length")]
    TrendSignal { extrema: usize },

    #[error("filter support of {support} samples exceeds signal length {len}; extend the signal first")]
    FilterTooLong { support: usize, len: usize },

    #[error("unknown {what} '{name}'")]
    UnknownTag { what: &'static str, name: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("frequency {frequency} Hz is not on a DFT bin of a {window}-sample window; nearest admissible is {suggested} Hz")]
    OffBinFrequency {
        frequency: f64,
        window: usize,
        suggested: f64,
    },

    #[error("{0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
