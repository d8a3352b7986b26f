//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Hilbert-space dimension (or enumeration size) exceeds the configured cap.
    #[error("capacity exceeded: {what} = {got} exceeds cap {cap}")]
    Capacity {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("site or link index {index} out of range for L = {l}")]
    IndexOutOfRange { index: usize, l: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    /// Requested product state violates the target-sector constraints at the
    /// listed sites (0-based).
    #[error("state not in target sector; violated constraints at sites {violated:?}")]
    NotInTargetSector { violated: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("coefficient sequences must not contain zeros")]
    ZeroCoefficient,

    #[error("the circuit simulator supports open boundaries only")]
    PeriodicUnsupported,

    #[error("Krylov step failed to converge after {halvings} step halvings")]
    KrylovNoConvergence { halvings: usize },

    #[error("time grid must be sorted and start at 0")]
    UnsortedTimes,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
