//! Crate-wide error type.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while loading data, fitting models, or scoring intervals.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying I/O failure while reading or writing a file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A CSV row that could not be parsed. `line` is 1-based and counts the
    /// header.
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    /// Timestamps must be strictly increasing.
    #[error("line {line}: timestamp does not increase over the previous row")]
    NonMonotoneTimestamp { line: usize },

    /// Volumes are counts and may not be negative.
    #[error("line {line}: negative volume {value}")]
    NegativeVolume { line: usize, value: f64 },

    /// A configuration value violated its documented range.
    #[error("invalid {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    /// The series is too short for the requested windowing or fit.
    #[error("series too short: have {len} observations, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },

    /// Matrix or vector shapes do not line up.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    /// A NaN or infinity appeared where only finite values are allowed.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// An interval forecast with zero points cannot be scored.
    #[error("empty forecast")]
    EmptyForecast,

    /// A lower bound exceeded its upper bound.
    #[error("row {index}: lower bound {lower} exceeds upper bound {upper}")]
    BoundOrder { index: usize, lower: f64, upper: f64 },

    /// A train/test split asked for more samples than exist.
    #[error("split {train_len}+{test_len} exceeds the {available} available samples")]
    SplitTooLarge {
        train_len: usize,
        test_len: usize,
        available: usize,
    },

    /// Every candidate autoregressive order had a singular regressor matrix.
    #[error("no autoregressive order could be fitted")]
    NoArCandidate,

    /// An iterative numeric routine exhausted its iteration budget.
    #[error("{what} did not converge within {limit} iterations")]
    NoConvergence { what: &'static str, limit: usize },

    /// Model serialization or deserialization failed.
    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Helper for `InvalidParameter` to keep call sites short.
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            why: why.into(),
        }
    }
}
