//! Numerical core for forward and backward problems of multi-term
//! time-fractional diffusion.
//!
//! Everything is generic over the scalar type through [`scalar::Real`]
//! (implemented by `f32` and `f64`); the crate root re-exports the `f64`
//! instantiations under convenience aliases.

pub mod backward;
pub mod caputo;
pub mod contour;
pub mod error;
pub mod fit;
pub mod forward;
pub mod gamma;
pub mod mlf;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod spectral;

pub use backward::{backward_solve, backward_solve_homogeneous, backward_solve_homogeneous_with,
    backward_solve_with, conditional_stability_check, conditional_stability_check_with,
    denominator, denominator_with, illposedness_demo, illposedness_demo_with, two_sided_ratios};
pub use caputo::{caputo_l1, residual};
pub use error::{Error, Result};
pub use forward::{convolve_source, convolve_source_with, forward_solve, forward_solve_with,
    geometric_grid, smoothing_check};
pub use mlf::{
    mlf_asymptotic, mlf_contour, mlf_eval, mlf_eval_with, mlf_series, propagator,
    propagator_with, relaxation, relaxation_asymptotic, relaxation_oracle,
    relaxation_oracle_with, relaxation_with, series_peak_exponent, EvalMethod,
};
pub use scalar::Real;
pub use spectral::{fractional_norm, project, synthesize, uniform_grid, BasisKind};

/// `f64` instantiations of the parameter types.
pub type FractionalOrders = mlf::FractionalOrders<f64>;
pub type MLParams = mlf::MLParams<f64>;
pub type MLArguments = mlf::MLArguments<f64>;
pub type EvalResult = mlf::EvalResult<f64>;
pub type MlfConfig = mlf::MlfConfig<f64>;
pub type DiagonalOperator = spectral::DiagonalOperator<f64>;
pub type SpectralVector = spectral::SpectralVector<f64>;
pub type TimeFn = forward::TimeFn<f64>;
pub type SourceTerm = forward::SourceTerm<f64>;
pub type SolveConfig = forward::SolveConfig<f64>;
pub type TrajectoryResult = forward::TrajectoryResult<f64>;
pub type SmoothingReport = forward::SmoothingReport<f64>;
pub type BackwardProblemSpec = backward::BackwardProblemSpec<f64>;
pub type ReconstructionResult = backward::ReconstructionResult<f64>;
pub type IllposednessReport = backward::IllposednessReport<f64>;
pub type PrioriBound = backward::PrioriBound<f64>;
pub type StabilityCase = backward::StabilityCase<f64>;
pub type StabilityReport = backward::StabilityReport<f64>;
pub type TimeGrid = caputo::TimeGrid<f64>;
pub type ResidualReport = caputo::ResidualReport<f64>;
