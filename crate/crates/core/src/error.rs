use std::path::PathBuf;

use thiserror::Error;

/// Every failure mode surfaced by the lab's kernels.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("malformed dataset: {0}")]
    MalformedDataset(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("height {requested} exceeds usable dataset height {available}")]
    HeightExceeded { requested: f64, available: f64 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("argument {value} outside table range [0, {limit}]")]
    RangeExceeded { value: f64, limit: f64 },

    #[error("sieve too short: tail bound {tail_bound:e} above tolerance {tol:e}; need N >= {required_n}")]
    InsufficientSieve {
        required_n: u64,
        tail_bound: f64,
        tol: f64,
    },

    #[error("zero window too low: tail bound {tail_bound:e} above tolerance; need T >= {required_t}")]
    InsufficientHeight { required_t: f64, tail_bound: f64 },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("parameters outside admissible range: {0}")]
    RangeViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
