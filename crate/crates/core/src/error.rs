use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("grid under-resolved: resolution {resolution} < required {required} ({reason})")]
    UnderResolved {
        resolution: usize,
        required: usize,
        reason: String,
    },

    #[error("quadrature did not converge after {doublings} doublings (last {last:e}, previous {previous:e})")]
    NonConvergent { doublings: u32, last: f64, previous: f64 },

    #[error("point ({x}, {y}) lies outside the field's valid domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("epsilon {epsilon} too large for non-periodic axis of width {width} (must be < {limit})")]
    EpsilonTooLarge { epsilon: f64, width: f64, limit: f64 },

    #[error("eigenvalue {re} + {im}i has modulus {modulus} too close to 1 to classify")]
    AmbiguousModulus { re: f64, im: f64, modulus: f64 },

    #[error("dimension hypothesis violated: ell = {ell} exceeds min(dim E^s = {dim_s}, dim E^u = {dim_u})")]
    DimensionHypothesis { ell: usize, dim_s: usize, dim_u: usize },

    #[error("integration inconsistency: {0}")]
    Inconsistent(String),

    #[error("malformed grid file: {0}")]
    Parse(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
