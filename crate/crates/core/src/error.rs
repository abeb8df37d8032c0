use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff {cutoff} must be at least {min}")]
    CutoffBelowMinimum { cutoff: usize, min: usize },

    #[error("cutoff {cutoff} too small for n_bar = {n_bar}: truncated thermal tail {tail:.3e} exceeds {tolerance:.0e}")]
    CutoffTooSmall {
        n_bar: f64,
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error(
        "trace leakage {leakage:.3e} exceeds {limit:.0e} (cutoff too small for these parameters)"
    )]
    LeakageExceeded { leakage: f64, limit: f64 },

    #[error("g2(0) is undefined for mean photon number {mean:.3e}")]
    UndefinedForVacuum { mean: f64 },

    #[error("grid reaches |beta|^2 = {beta_sq_max}, beyond the limit {limit} for cutoff {cutoff}")]
    GridOutsideTruncation {
        beta_sq_max: f64,
        limit: f64,
        cutoff: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a density operator: {0}")]
    InvalidState(String),
}
