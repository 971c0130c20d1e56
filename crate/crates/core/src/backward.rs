//! Backward solver: recover the initial state u(0) from the final state
//! u(T).
//!
//! In the eigenbasis the forward map is diagonal, u_k(T) = φ_k D_k + (source
//! part), with D_k = ω(T; λ_k) the relaxation factor. Reconstruction divides
//! by the exact D_k; there is no regularization on purpose. The amplification
//! 1/D_k grows like λ_k, which is what makes the problem ill-posed for rough
//! final data and well-posed again once the data is measured in the graph
//! norm. [`illposedness_demo`] and [`conditional_stability_check`] quantify
//! both sides.

use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::forward::{forward_solve_with, SolveConfig, SourceTerm};
use crate::mlf::{relaxation_with, FractionalOrders, MlfConfig};
use crate::scalar::Real;
use crate::spectral::{fractional_norm, DiagonalOperator, SpectralVector};

/// Backward problem statement: find u(0) given u(T) = `final_data`.
#[derive(Clone, Debug)]
pub struct BackwardProblemSpec<T> {
    pub op: DiagonalOperator<T>,
    pub orders: FractionalOrders<T>,
    pub horizon: T,
    pub final_data: SpectralVector<T>,
    pub source: SourceTerm<T>,
}

impl<T: Real> BackwardProblemSpec<T> {
    /// Checks shapes and that the final data has a finite graph norm (the
    /// reconstruction estimates are stated for data in the operator domain).
    pub fn new(
        op: DiagonalOperator<T>,
        orders: FractionalOrders<T>,
        horizon: T,
        final_data: SpectralVector<T>,
        source: SourceTerm<T>,
    ) -> Result<Self> {
        let spec = Self::new_unchecked(op, orders, horizon, final_data, source)?;
        let graph = fractional_norm(&spec.op, &spec.final_data, T::one())?;
        if !graph.is_finite() {
            return Err(Error::InvalidParams(
                "final data has no finite graph norm; use new_unchecked for rough-data demos"
                    .into(),
            ));
        }
        Ok(spec)
    }

    /// Same shape checks, but deliberately skips the graph-norm gate so
    /// ill-posedness demonstrations can feed rough data.
    pub fn new_unchecked(
        op: DiagonalOperator<T>,
        orders: FractionalOrders<T>,
        horizon: T,
        final_data: SpectralVector<T>,
        source: SourceTerm<T>,
    ) -> Result<Self> {
        if !(horizon.is_finite() && horizon > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if final_data.len() != op.n_modes() {
            return Err(Error::LengthMismatch { expected: op.n_modes(), got: final_data.len() });
        }
        if let Some(m) = source.n_modes() {
            if m != op.n_modes() {
                return Err(Error::LengthMismatch { expected: op.n_modes(), got: m });
            }
        }
        Ok(Self { op, orders, horizon, final_data, source })
    }
}

/// Observed constants of a reconstruction.
#[derive(Clone, Debug)]
pub struct ReconstructionDiagnostics<T> {
    /// ‖Φ‖₁ of the supplied final data.
    pub final_graph_norm: T,
    /// ‖v(T)‖ of the zero-initial-state source response subtracted before
    /// inversion (zero in the homogeneous case).
    pub source_final_norm: T,
    /// ‖u(0)‖ of the reconstruction.
    pub recon_norm: T,
    /// Observed stability constant ‖u(0)‖ / (‖Φ‖₁ + max_t ‖f(t)‖_ε).
    pub stability_ratio: T,
    pub max_amplification: T,
}

/// Reconstructed initial state together with the per-mode inversion factors.
#[derive(Clone, Debug)]
pub struct ReconstructionResult<T> {
    pub phi_hat: SpectralVector<T>,
    /// D_k = ω(T; λ_k), each in (0, 1].
    pub denominators: Vec<T>,
    /// 1/D_k, nondecreasing along the ascending spectrum.
    pub amplification: Vec<T>,
    pub diagnostics: ReconstructionDiagnostics<T>,
}

/// Per-mode inversion factor D = ω(T; λ), guaranteed positive.
pub fn denominator<T: Real>(orders: &FractionalOrders<T>, lambda: T, horizon: T) -> Result<T> {
    denominator_with(&MlfConfig::default(), orders, lambda, horizon)
}

pub fn denominator_with<T: Real>(
    cfg: &MlfConfig<T>,
    orders: &FractionalOrders<T>,
    lambda: T,
    horizon: T,
) -> Result<T> {
    if !(horizon.is_finite() && horizon > T::zero()) {
        return Err(Error::InvalidParams(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let d = relaxation_with(cfg, orders, lambda, horizon)?;
    if !(d.is_finite() && d > T::zero()) {
        return Err(Error::ContourFailure);
    }
    Ok(d)
}

/// Invert the homogeneous (f = 0) forward map: φ̂_k = Φ_k / D_k.
pub fn backward_solve_homogeneous<T: Real>(
    spec: &BackwardProblemSpec<T>,
) -> Result<ReconstructionResult<T>> {
    backward_solve_homogeneous_with(&SolveConfig::default(), spec)
}

pub fn backward_solve_homogeneous_with<T: Real>(
    cfg: &SolveConfig<T>,
    spec: &BackwardProblemSpec<T>,
) -> Result<ReconstructionResult<T>> {
    if !spec.source.is_zero() {
        return Err(Error::InvalidParams(
            "homogeneous backward solve requires a zero source; use backward_solve".into(),
        ));
    }
    invert_final_data(cfg, spec, &spec.final_data, T::zero(), T::zero())
}

/// Split reconstruction for a nonzero source: subtract the zero-initial-state
/// response v(T), then invert the homogeneous map on Φ − v(T).
pub fn backward_solve<T: Real>(spec: &BackwardProblemSpec<T>) -> Result<ReconstructionResult<T>> {
    backward_solve_with(&SolveConfig::default(), spec)
}

pub fn backward_solve_with<T: Real>(
    cfg: &SolveConfig<T>,
    spec: &BackwardProblemSpec<T>,
) -> Result<ReconstructionResult<T>> {
    if spec.source.is_zero() {
        return invert_final_data(cfg, spec, &spec.final_data, T::zero(), T::zero());
    }
    let v = forward_solve_with(
        cfg,
        &spec.op,
        &spec.orders,
        &SpectralVector::zeros(spec.op.n_modes()),
        &spec.source,
        &[spec.horizon],
    )?;
    let v_final = v.final_state();
    let homogeneous_data = spec.final_data.minus(v_final)?;
    let f_sup = spec.source.max_fractional_norm(
        &spec.op,
        &source_sample_times(spec.horizon),
        spec.source.epsilon_reg(),
    )?;
    invert_final_data(cfg, spec, &homogeneous_data, v.norm0[0], f_sup)
}

fn source_sample_times<T: Real>(horizon: T) -> Vec<T> {
    let n = 33;
    (0..=n).map(|i| horizon * T::of_usize(i) / T::of_usize(n)).collect()
}

fn invert_final_data<T: Real>(
    cfg: &SolveConfig<T>,
    spec: &BackwardProblemSpec<T>,
    data: &SpectralVector<T>,
    source_final_norm: T,
    f_sup: T,
) -> Result<ReconstructionResult<T>> {
    let n = spec.op.n_modes();
    let mut denominators = Vec::with_capacity(n);
    let mut amplification = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for (k, &lam) in spec.op.eigenvalues().iter().enumerate() {
        let d = denominator_with(&cfg.mlf, &spec.orders, lam, spec.horizon)?;
        denominators.push(d);
        amplification.push(d.recip());
        coeffs.push(data.coeffs()[k] / d);
    }
    let phi_hat = SpectralVector::new(coeffs)?;
    let final_graph_norm = fractional_norm(&spec.op, &spec.final_data, T::one())?;
    let recon_norm = fractional_norm(&spec.op, &phi_hat, T::zero())?;
    let stability_ratio = recon_norm / (final_graph_norm + f_sup);
    let max_amplification = amplification.iter().cloned().fold(T::zero(), T::max);
    Ok(ReconstructionResult {
        phi_hat,
        denominators,
        amplification,
        diagnostics: ReconstructionDiagnostics {
            final_graph_norm,
            source_final_norm,
            recon_norm,
            stability_ratio,
            max_amplification,
        },
    })
}

/// One row per mode of the Hadamard instability table.
#[derive(Clone, Debug)]
pub struct IllposednessReport<T> {
    pub ks: Vec<usize>,
    pub lambdas: Vec<T>,
    /// ‖Φ‖ = λ_k^{−1+ε}: tends to zero.
    pub data_norms: Vec<T>,
    /// ‖Φ‖₁ = λ_k^{ε}: tends to infinity once measured in the graph norm.
    pub data_graph_norms: Vec<T>,
    /// ‖u(0)‖ = λ_k^{−1+ε}/D_k: tends to infinity.
    pub recon_norms: Vec<T>,
    pub amplification: Vec<T>,
    /// Fitted log-log slope of 1/D_k against λ_k (≈ 1).
    pub slope: T,
    pub data_norms_decreasing: bool,
    pub recon_norms_increasing: bool,
    pub graph_norms_increasing: bool,
}

/// Sweep Φ = λ_k^{−1+ε} e_k over `k_range` (1-based, inclusive): vanishing
/// data with exploding reconstructions, the textbook Hadamard picture.
pub fn illposedness_demo<T: Real>(
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    eps: T,
    k_range: (usize, usize),
) -> Result<IllposednessReport<T>> {
    illposedness_demo_with(&MlfConfig::default(), op, orders, horizon, eps, k_range)
}

pub fn illposedness_demo_with<T: Real>(
    cfg: &MlfConfig<T>,
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    eps: T,
    k_range: (usize, usize),
) -> Result<IllposednessReport<T>> {
    if !(eps.is_finite() && eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidParams(format!(
            "ill-posedness exponent must lie in (0, 1), got {eps}"
        )));
    }
    let (k_lo, k_hi) = k_range;
    if k_lo < 1 || k_lo >= k_hi || k_hi > op.n_modes() {
        return Err(Error::InvalidParams(format!(
            "mode range ({k_lo}, {k_hi}) must satisfy 1 <= lo < hi <= {}",
            op.n_modes()
        )));
    }
    let mut ks = Vec::new();
    let mut lambdas = Vec::new();
    let mut data_norms = Vec::new();
    let mut data_graph_norms = Vec::new();
    let mut recon_norms = Vec::new();
    let mut amplification = Vec::new();
    for k in k_lo..=k_hi {
        let lam = op.eigenvalues()[k - 1];
        let d = denominator_with(cfg, orders, lam, horizon)?;
        let data_norm = lam.powf(eps - T::one());
        ks.push(k);
        lambdas.push(lam);
        data_norms.push(data_norm);
        data_graph_norms.push(lam.powf(eps));
        recon_norms.push(data_norm / d);
        amplification.push(d.recip());
    }
    let slope = loglog_slope(&lambdas, &amplification)?;
    let strictly = |xs: &[T], up: bool| {
        xs.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] })
    };
    Ok(IllposednessReport {
        data_norms_decreasing: strictly(&data_norms, false),
        recon_norms_increasing: strictly(&recon_norms, true),
        graph_norms_increasing: strictly(&data_graph_norms, true),
        ks,
        lambdas,
        data_norms,
        data_graph_norms,
        recon_norms,
        amplification,
        slope,
    })
}

/// A-priori radius: the admissible set is ‖φ‖_ε ≤ b0.
#[derive(Clone, Copy, Debug)]
pub struct PrioriBound<T> {
    pub epsilon: T,
    pub b0: T,
}

impl<T: Real> PrioriBound<T> {
    pub fn new(epsilon: T, b0: T) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "a-priori smoothness exponent must be positive, got {epsilon}"
            )));
        }
        if !(b0.is_finite() && b0 > T::zero()) {
            return Err(Error::InvalidParams(format!(
                "a-priori radius must be positive, got {b0}"
            )));
        }
        Ok(Self { epsilon, b0 })
    }
}

/// One (φ, f) instance of the conditional-stability family.
#[derive(Clone, Debug)]
pub struct StabilityCase<T> {
    pub phi: SpectralVector<T>,
    pub source: SourceTerm<T>,
}

#[derive(Clone, Debug)]
pub struct StabilityReport<T> {
    /// Q = ‖φ‖ / ([‖u(T)‖ + max_t ‖f(t)‖]^{ε/(1+ε)} · b0^{1/(1+ε)}) per case.
    pub qs: Vec<T>,
    pub sup_q: T,
    /// Scale factors of the homogeneity sweep on the first case.
    pub sweep_scales: Vec<T>,
    /// max_s |Q(s) − Q(1)| / Q(1): the bound is homogeneous of degree one,
    /// so simultaneous scaling of (φ, f, b0) must leave Q unchanged.
    pub sweep_max_deviation: T,
    pub all_finite: bool,
}

/// Evaluate the conditional-stability ratio over a family of cases that
/// share the a-priori bound. Errors with `PrioriViolation` if any case
/// breaks ‖φ‖_ε ≤ b0.
pub fn conditional_stability_check<T: Real>(
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    cases: &[StabilityCase<T>],
    bound: PrioriBound<T>,
    sweep_scales: &[T],
) -> Result<StabilityReport<T>> {
    conditional_stability_check_with(
        &SolveConfig::default(),
        op,
        orders,
        horizon,
        cases,
        bound,
        sweep_scales,
    )
}

pub fn conditional_stability_check_with<T: Real>(
    cfg: &SolveConfig<T>,
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    cases: &[StabilityCase<T>],
    bound: PrioriBound<T>,
    sweep_scales: &[T],
) -> Result<StabilityReport<T>> {
    if cases.is_empty() {
        return Err(Error::InvalidParams("stability check needs at least one case".into()));
    }
    if sweep_scales.iter().any(|s| !(s.is_finite() && *s > T::zero())) {
        return Err(Error::InvalidParams("sweep scales must be positive".into()));
    }
    let mut qs = Vec::with_capacity(cases.len());
    for case in cases {
        qs.push(stability_q(cfg, op, orders, horizon, case, bound)?);
    }
    let sup_q = qs.iter().cloned().fold(T::zero(), T::max);
    // homogeneity sweep: rescale data and radius together, re-solve honestly
    let mut sweep_max_deviation = T::zero();
    let base = qs[0];
    for &s in sweep_scales {
        let case = &cases[0];
        let scaled = StabilityCase {
            phi: case.phi.scaled(s),
            source: scale_source(&case.source, s)?,
        };
        let scaled_bound = PrioriBound { epsilon: bound.epsilon, b0: bound.b0 * s };
        let q_s = stability_q(cfg, op, orders, horizon, &scaled, scaled_bound)?;
        sweep_max_deviation = sweep_max_deviation.max((q_s - base).abs() / base);
    }
    let all_finite = qs.iter().all(|q| q.is_finite());
    Ok(StabilityReport {
        qs,
        sup_q,
        sweep_scales: sweep_scales.to_vec(),
        sweep_max_deviation,
        all_finite,
    })
}

fn scale_source<T: Real>(f: &SourceTerm<T>, s: T) -> Result<SourceTerm<T>> {
    use crate::forward::SourceKind;
    match f.kind() {
        SourceKind::Zero => Ok(SourceTerm::zero()),
        SourceKind::Separable { profile, time } => {
            SourceTerm::separable(profile.scaled(s), time.clone(), f.epsilon_reg())
        }
        SourceKind::Sampled { .. } => Err(Error::InvalidParams(
            "scaling sweep supports zero and separable sources".into(),
        )),
    }
}

fn stability_q<T: Real>(
    cfg: &SolveConfig<T>,
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    case: &StabilityCase<T>,
    bound: PrioriBound<T>,
) -> Result<T> {
    let phi_eps = fractional_norm(op, &case.phi, bound.epsilon)?;
    if phi_eps > bound.b0 {
        return Err(Error::PrioriViolation {
            norm: phi_eps.to_f64().unwrap_or(f64::NAN),
            bound: bound.b0.to_f64().unwrap_or(f64::NAN),
        });
    }
    let phi_norm = fractional_norm(op, &case.phi, T::zero())?;
    if phi_norm == T::zero() {
        return Err(Error::InvalidParams("stability case needs a nonzero initial state".into()));
    }
    let traj = forward_solve_with(cfg, op, orders, &case.phi, &case.source, &[horizon])?;
    let final_norm = traj.norm0[0];
    let f_sup = case.source.max_fractional_norm(
        op,
        &source_sample_times(horizon),
        T::zero(),
    )?;
    let one = T::one();
    let expo_data = bound.epsilon / (one + bound.epsilon);
    let expo_radius = one / (one + bound.epsilon);
    Ok(phi_norm / ((final_norm + f_sup).powf(expo_data) * bound.b0.powf(expo_radius)))
}

/// ‖u(T)‖₁ / ‖u(0)‖ for each initial state: the two-sided estimate says
/// these ratios stay inside a fixed positive interval.
pub fn two_sided_ratios<T: Real>(
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    horizon: T,
    phis: &[SpectralVector<T>],
) -> Result<Vec<T>> {
    let cfg = SolveConfig::default();
    let zero_f = SourceTerm::zero();
    phis.iter()
        .map(|phi| {
            let traj = forward_solve_with(&cfg, op, orders, phi, &zero_f, &[horizon])?;
            let num = traj.norm1[0];
            let den = fractional_norm(op, phi, T::zero())?;
            if den == T::zero() {
                return Err(Error::InvalidParams("two-sided ratio needs nonzero data".into()));
            }
            Ok(num / den)
        })
        .collect()
}
