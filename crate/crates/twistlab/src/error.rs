//! Error type shared by all modules, with a stable mapping to CLI exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    Range(String),

    /// A quadrature or grid-refinement loop hit its cap before reaching the
    /// requested tolerance. Carries the best estimate obtained so far.
    #[error("numeric non-convergence: requested {requested:e}, achieved {achieved:e} (best estimate {best:e})")]
    NonConvergence {
        requested: f64,
        achieved: f64,
        best: f64,
    },

    #[error("numeric: {0}")]
    Numeric(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An internal consistency check failed on generated or loaded data.
    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("table resolution: {0}")]
    TableResolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error class: 2 validation, 3 numeric,
    /// 4 resource limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Range(_) | Error::DataCorruption(_) | Error::Io(_) => 2,
            Error::NonConvergence { .. }
            | Error::Numeric(_)
            | Error::Calibration(_)
            | Error::TableResolution(_) => 3,
            Error::ResourceLimit(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
