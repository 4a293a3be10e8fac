use thiserror::Error;

use crate::quadrature::QuadratureError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix is not Hermitian: max |M - M^H| = {asymmetry:e} exceeds {allowed:e}")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("matrix is not positive definite: min eigenvalue {min_eigenvalue:e} <= threshold {threshold:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("interval [{lo}, {hi}] is outside the domain [{domain_lo}, {domain_hi}] of {label}")]
    OutOfDomain {
        label: String,
        lo: f64,
        hi: f64,
        domain_lo: f64,
        domain_hi: f64,
    },

    #[error("no sign change while solving for the mean crossing: g(0) = {at_zero:e}, g(1) = {at_one:e}")]
    NoSignChange { at_zero: f64, at_one: f64 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("{theorem} failed on instance {index} (seed {seed}): {source}")]
    Chain {
        theorem: String,
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            value,
            reason: reason.into(),
        }
    }
}
