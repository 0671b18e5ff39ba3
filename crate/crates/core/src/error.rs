//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Filter and series supports never fully overlap, convolution is empty.
    #[error("empty overlap: filter of length {filter_len} does not fit inside series of length {series_len}")]
    EmptyOverlap { filter_len: usize, series_len: usize },

    /// Series shorter than the 2k(n)+1 filter window.
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// No sign change of the criterion found on the sigma grid, even after
    /// extending it once.
    #[error("no root: criterion has no sign change on (0, {sigma_max}]")]
    NoRoot { sigma_max: f64 },

    /// Every multi-start search ended without a criterion root.
    #[error("all {starts} starts failed to bracket a criterion root")]
    AllStartsFailed { starts: usize },

    /// Cannot normalize the zero filter.
    #[error("zero filter cannot be normalized")]
    ZeroFilter,

    /// Leading polynomial coefficient of the null eigenvector is numerically
    /// zero, so the alphabet polynomial degree collapses.
    #[error("degenerate leading coefficient {magnitude:.3e} in the alphabet polynomial")]
    DegenerateLeadingCoeff { magnitude: f64 },

    /// Two recovered support points coincide; the weight system is singular.
    #[error("singular Vandermonde system: support points {a} and {b} coincide")]
    SingularVandermonde { a: usize, b: usize },

    /// Criterion Hessian in the filter parameters is numerically singular.
    #[error("singular criterion Hessian (condition number {cond:.3e})")]
    SingularHessian { cond: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
