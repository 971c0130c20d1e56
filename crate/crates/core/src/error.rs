//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation received out-of-domain parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A fractional order lies outside its admissible range.
    #[error("invalid order: {0}")]
    InvalidOrder(String),

    /// The series did not meet its tail bound within the shell budget.
    #[error("series did not converge within {shells} total-degree shells (last shell magnitude {last_shell})")]
    NoConvergence { shells: usize, last_shell: f64 },

    /// The alternating series cannot be summed at this argument in the
    /// working precision: intermediate terms dwarf the result.
    #[error("series numerically unstable here: peak term magnitude exp({peak_log}) vs requested tolerance")]
    SeriesUnstable { peak_log: f64 },

    /// Asymptotic expansion requested below its validity threshold.
    #[error("argument too small for the asymptotic expansion: |z1| = {z1_abs} < {min_abs}")]
    SmallArgument { z1_abs: f64, min_abs: f64 },

    /// A contour quadrature produced a non-finite value.
    #[error("contour quadrature failed (non-finite result)")]
    ContourFailure,

    /// Vector lengths disagree with the operator's mode count.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A spatial grid is too coarse (or malformed) for the requested modes.
    #[error("grid too coarse: need at least {needed} points ({constraint}), got {got}")]
    GridTooCoarse { needed: usize, got: usize, constraint: &'static str },

    /// The operation needs a concrete basis with known eigenfunctions.
    #[error("operation unsupported for this basis: {0}")]
    UnsupportedBasis(&'static str),

    /// The two-level refinement estimate stayed above the tolerance.
    #[error("quadrature failure: error estimate {estimate} exceeds tolerance {tolerance}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    /// Time grids of trajectory and source (or scheme) do not line up.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Data violates the declared a-priori bound.
    #[error("a-priori bound violated: ||phi||_eps = {norm} > B0 = {bound}")]
    PrioriViolation { norm: f64, bound: f64 },
}
