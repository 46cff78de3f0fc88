use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("length error: {0}")]
    Length(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("refractory violation: spikes at {earlier} and {later} are closer than {refractory}")]
    Refractory {
        earlier: f64,
        later: f64,
        refractory: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("trace violation: got {got}, expected {expected}")]
    Trace { got: f64, expected: f64 },

    #[error("feature count {count} exceeds the limit of {limit}")]
    Overflow { count: u128, limit: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("recurrence diverged at step {step}: |y| = {value}")]
    Divergence { step: usize, value: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Divergence { .. })
    }
}
