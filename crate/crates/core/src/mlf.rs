//! The multinomial (multi-index) Mittag-Leffler function and the two kernel
//! functions built from it.
//!
//! For exponents β = (β_1, …, β_M), β_j ∈ (0, 1], a base parameter β_0 > 0
//! and arguments z = (z_1, …, z_M), z_j ≤ 0, the function is
//!
//! ```text
//! E_(β),β0 (z) = Σ_{k≥0} Σ_{k1+…+kM = k} (k; k1…kM) Π_j z_j^{k_j}
//!                / Γ(β0 + Σ_j β_j k_j)
//! ```
//!
//! with (k; k1…kM) the multinomial coefficient. Restricted to the closed
//! negative orthant the terms of a fixed total degree k share the sign
//! (−1)^k, so the shell sums form an alternating series.
//!
//! Evaluation uses three routes:
//!
//! * the defining series, summed shell by shell with compensated
//!   accumulation, valid while the peak term stays small enough that
//!   cancellation cannot eat the answer;
//! * a parabolic-contour quadrature of the Hankel-loop representation
//!   E = (1/2πi) ∮ e^σ σ^{−β0} / (1 − Σ_j z_j σ^{−β_j}) dσ, which covers
//!   every argument scale (the denominator has no zeros off the cut for
//!   z_j ≤ 0, because Im Σ_j |z_j| σ^{−β_j} has one sign for 0 < arg σ ≤ π);
//! * the algebraic large-|z_1| expansion with p ∈ {1, 2} terms.
//!
//! A multi-term fractional diffusion operator Σ_j q_j ∂^{ρ_j} with
//! 1 > ρ_1 > … > ρ_M > 0, q_1 = 1, q_j > 0 leads to kernels with
//! β_0 ∈ {ρ_1, ρ_1 + 1}, exponents (ρ_1, ρ_1−ρ_2, …, ρ_1−ρ_M) and arguments
//! (−λt^{ρ_1}, −q_2 t^{ρ_1−ρ_2}, …, −q_M t^{ρ_1−ρ_M}); [`FractionalOrders`]
//! owns that bookkeeping. [`relaxation`] is the decay factor multiplying the
//! initial data of mode λ, [`propagator`] the convolution kernel applied to
//! the source.

use num_complex::Complex;

use crate::contour::{hankel_parabola, talbot_inverse};
use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, recip_gamma};
use crate::scalar::{KahanSum, Real};

/// Orders and weights of the operator Σ_j q_j ∂^{ρ_j}_t.
///
/// Invariants established at construction: nonempty, same length, strictly
/// decreasing ρ with every ρ_j in (0, 1) (or (0, 1] through
/// [`FractionalOrders::new_relaxed`], admitting the classical limit ρ = 1
/// for cross-checks), q_1 = 1 exactly, all q_j > 0 and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalOrders<T> {
    rhos: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> FractionalOrders<T> {
    pub fn new(rhos: Vec<T>, weights: Vec<T>) -> Result<Self> {
        Self::build(rhos, weights, false)
    }

    /// Like [`FractionalOrders::new`] but admits ρ_j = 1, so the classical
    /// diffusion limit can be exercised by tests. The solvers treat such
    /// orders exactly like any other.
    pub fn new_relaxed(rhos: Vec<T>, weights: Vec<T>) -> Result<Self> {
        Self::build(rhos, weights, true)
    }

    /// Single-term operator ∂^ρ with unit weight.
    pub fn single(rho: T) -> Result<Self> {
        Self::new(vec![rho], vec![T::one()])
    }

    fn build(rhos: Vec<T>, weights: Vec<T>, allow_unit: bool) -> Result<Self> {
        if rhos.is_empty() {
            return Err(Error::InvalidParams("at least one fractional order required".into()));
        }
        if rhos.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: rhos.len(), got: weights.len() });
        }
        for &r in &rhos {
            let upper_ok = if allow_unit { r <= T::one() } else { r < T::one() };
            if !(r.is_finite() && r > T::zero() && upper_ok) {
                return Err(Error::InvalidOrder(format!(
                    "orders must lie in (0, 1{}), got {r}",
                    if allow_unit { "]" } else { ")" }
                )));
            }
        }
        if rhos.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidOrder("orders must be strictly decreasing".into()));
        }
        if weights[0] != T::one() {
            return Err(Error::InvalidParams(format!(
                "leading weight must be exactly 1, got {}",
                weights[0]
            )));
        }
        for &q in &weights {
            if !(q.is_finite() && q > T::zero()) {
                return Err(Error::InvalidParams(format!("weights must be positive and finite, got {q}")));
            }
        }
        Ok(Self { rhos, weights })
    }

    pub fn m(&self) -> usize {
        self.rhos.len()
    }

    pub fn rho1(&self) -> T {
        self.rhos[0]
    }

    pub fn rhos(&self) -> &[T] {
        &self.rhos
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Exponent vector of the kernel functions: (ρ_1, ρ_1−ρ_2, …, ρ_1−ρ_M).
    pub fn kernel_exponents(&self) -> Vec<T> {
        let rho1 = self.rho1();
        let mut b = Vec::with_capacity(self.m());
        b.push(rho1);
        for &r in &self.rhos[1..] {
            b.push(rho1 - r);
        }
        b
    }

    /// Argument vector of the kernel functions at eigenvalue λ and time t:
    /// (−λ t^{ρ_1}, −q_2 t^{ρ_1−ρ_2}, …, −q_M t^{ρ_1−ρ_M}).
    pub fn kernel_arguments(&self, lambda: T, t: T) -> Vec<T> {
        let rho1 = self.rho1();
        let mut z = Vec::with_capacity(self.m());
        z.push(-lambda * t.powf(rho1));
        for j in 1..self.m() {
            z.push(-self.weights[j] * t.powf(rho1 - self.rhos[j]));
        }
        z
    }
}

/// (β_0, β) parameter pair of the multinomial Mittag-Leffler function.
#[derive(Clone, Debug, PartialEq)]
pub struct MLParams<T> {
    beta0: T,
    betas: Vec<T>,
}

impl<T: Real> MLParams<T> {
    pub fn new(beta0: T, betas: Vec<T>) -> Result<Self> {
        Self::build(beta0, betas, false)
    }

    /// Admits β_j = 1 (classical-limit checks); otherwise identical to
    /// [`MLParams::new`].
    pub fn new_relaxed(beta0: T, betas: Vec<T>) -> Result<Self> {
        Self::build(beta0, betas, true)
    }

    fn build(beta0: T, betas: Vec<T>, allow_unit: bool) -> Result<Self> {
        if !(beta0.is_finite() && beta0 > T::zero()) {
            return Err(Error::InvalidParams(format!("beta0 must be positive and finite, got {beta0}")));
        }
        if betas.is_empty() {
            return Err(Error::InvalidParams("at least one exponent required".into()));
        }
        for &b in &betas {
            let upper_ok = if allow_unit { b <= T::one() } else { b < T::one() };
            if !(b.is_finite() && b > T::zero() && upper_ok) {
                return Err(Error::InvalidOrder(format!(
                    "exponents must lie in (0, 1{}), got {b}",
                    if allow_unit { "]" } else { ")" }
                )));
            }
        }
        Ok(Self { beta0, betas })
    }

    /// Parameters of the relaxation kernel of `orders`: β_0 = ρ_1 + 1.
    pub fn relaxation_kernel(orders: &FractionalOrders<T>) -> Self {
        Self { beta0: orders.rho1() + T::one(), betas: orders.kernel_exponents() }
    }

    /// Parameters of the propagation kernel of `orders`: β_0 = ρ_1.
    pub fn propagation_kernel(orders: &FractionalOrders<T>) -> Self {
        Self { beta0: orders.rho1(), betas: orders.kernel_exponents() }
    }

    pub fn beta0(&self) -> T {
        self.beta0
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }
}

/// Evaluation point: all components must be finite and ≤ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MLArguments<T> {
    z: Vec<T>,
}

impl<T: Real> MLArguments<T> {
    pub fn new(z: Vec<T>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidParams("at least one argument required".into()));
        }
        for &zj in &z {
            if !(zj.is_finite() && zj <= T::zero()) {
                return Err(Error::InvalidParams(format!("arguments must be finite and <= 0, got {zj}")));
            }
        }
        Ok(Self { z })
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMethod {
    Series,
    Contour,
    Asymptotic,
}

impl core::fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            EvalMethod::Series => "series",
            EvalMethod::Contour => "contour",
            EvalMethod::Asymptotic => "asymptotic",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalResult<T> {
    pub value: T,
    pub method: EvalMethod,
    /// Estimated absolute error of `value`: last-shell magnitude plus
    /// cancellation noise for the series, the computed next-order
    /// coefficient over |z_1|^{p+1} for the asymptotic branch, and an
    /// empirically validated bound for the contour branch.
    pub est_abs_error: T,
}

/// Evaluation thresholds and budgets. The defaults are tuned for `f64`.
#[derive(Clone, Debug)]
pub struct MlfConfig<T> {
    /// Relative shell tolerance of the series.
    pub series_tol: T,
    /// Total-degree shell budget.
    pub series_kmax: usize,
    /// The series is trusted while (Σ_j |z_j|)^{1 / min_j β_j}, an upper
    /// bound on ln(peak term), stays at or below this. 7.0 keeps the
    /// cancellation noise near 1e-11 relative in f64.
    pub series_peak_max: T,
    /// |z_1| at and above which the dispatcher prefers the p = 2 asymptotic
    /// expansion over the contour.
    pub z_switch: T,
    /// Node count of the parabolic contour rule.
    pub contour_nodes: usize,
    /// Node count of the fixed-Talbot oracle rule.
    pub talbot_nodes: usize,
    /// λt^{ρ_1} at and above which `relaxation` may use the closed
    /// large-argument form (relative error ~ 1/λt^{ρ_1}).
    pub omega_asym_min: T,
    /// Hard floor of |z_1| for the asymptotic expansion.
    pub asym_min: T,
}

impl<T: Real> Default for MlfConfig<T> {
    fn default() -> Self {
        Self {
            series_tol: T::of(1e-14),
            series_kmax: 400,
            series_peak_max: T::of(7.0),
            z_switch: T::of(1e4),
            contour_nodes: 48,
            talbot_nodes: 32,
            omega_asym_min: T::of(1e10),
            asym_min: T::of(10.0),
        }
    }
}

fn check_shapes<T: Real>(params: &MLParams<T>, args: &MLArguments<T>) -> Result<()> {
    if params.betas.len() != args.z.len() {
        return Err(Error::LengthMismatch { expected: params.betas.len(), got: args.z.len() });
    }
    Ok(())
}

/// Upper bound on ln(max term) of the series at these arguments:
/// (Σ_j |z_j|)^{1 / min_j β_j}. Zero when every argument is zero.
pub fn series_peak_exponent<T: Real>(params: &MLParams<T>, args: &MLArguments<T>) -> T {
    let sum_abs = args.z.iter().fold(T::zero(), |a, &z| a + z.abs());
    if sum_abs == T::zero() {
        return T::zero();
    }
    let bmin = params.betas.iter().cloned().fold(T::infinity(), T::min);
    sum_abs.powf(bmin.recip())
}

fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: &mut [usize], f: &mut F) {
    fn rec<F: FnMut(&[usize])>(idx: usize, remaining: usize, parts: &mut [usize], f: &mut F) {
        if idx + 1 == parts.len() {
            parts[idx] = remaining;
            f(parts);
            return;
        }
        for v in 0..=remaining {
            parts[idx] = v;
            rec(idx + 1, remaining - v, parts, f);
        }
    }
    rec(0, total, parts, f);
}

/// Defining series, summed over total-degree shells with compensated
/// accumulation. Stops at the first shell k ≥ 1 whose largest term falls
/// below `tol` relative to the partial sum.
///
/// The caller is responsible for staying inside the numerically safe zone
/// (see [`series_peak_exponent`]); outside of it the alternating terms grow
/// large and the result degrades or overflows, which is reported as
/// [`Error::SeriesUnstable`] when detected.
pub fn mlf_series<T: Real>(
    params: &MLParams<T>,
    args: &MLArguments<T>,
    tol: T,
    kmax: usize,
) -> Result<EvalResult<T>> {
    check_shapes(params, args)?;
    if !(tol > T::zero() && tol.is_finite()) {
        return Err(Error::InvalidParams(format!("series tolerance must be positive, got {tol}")));
    }
    if kmax == 0 {
        return Err(Error::InvalidParams("shell budget must be at least 1".into()));
    }
    let m = args.z.len();
    let ln_abs_z: Vec<T> = args.z.iter().map(|&z| z.abs().ln()).collect();
    let is_zero: Vec<bool> = args.z.iter().map(|&z| z == T::zero()).collect();

    // ln k! cache, extended shell by shell
    let mut ln_fact: Vec<T> = vec![T::zero()];
    let mut sum = KahanSum::new();
    let mut peak = T::zero();
    let mut n_terms = 0usize;
    let mut parts = vec![0usize; m];
    let mut last_shell = T::zero();

    for k in 0..=kmax {
        while ln_fact.len() <= k {
            let n = ln_fact.len();
            ln_fact.push(ln_fact[n - 1] + T::of_usize(n).ln());
        }
        let mut shell_max = T::zero();
        let mut overflow = false;
        let negative = k % 2 == 1;
        for_each_composition(k, &mut parts, &mut |kj: &[usize]| {
            if overflow || kj.iter().zip(&is_zero).any(|(&c, &z0)| z0 && c > 0) {
                return;
            }
            let mut ln_term = ln_fact[k];
            let mut gamma_arg = params.beta0;
            for (j, &c) in kj.iter().enumerate() {
                ln_term -= ln_fact[c];
                if c > 0 {
                    ln_term += T::of_usize(c) * ln_abs_z[j];
                }
                gamma_arg += params.betas[j] * T::of_usize(c);
            }
            ln_term -= ln_gamma(gamma_arg);
            let mag = ln_term.exp();
            if !mag.is_finite() {
                overflow = true;
                return;
            }
            shell_max = shell_max.max(mag);
            sum.add(if negative { -mag } else { mag });
            n_terms += 1;
        });
        if overflow {
            return Err(Error::SeriesUnstable {
                peak_log: series_peak_exponent(params, args).to_f64().unwrap_or(f64::NAN),
            });
        }
        peak = peak.max(shell_max);
        last_shell = shell_max;
        if k >= 1 {
            let scale = sum.value().abs().max(T::min_positive_value());
            if shell_max < tol * scale {
                let noise = T::epsilon() * peak * T::of_usize(n_terms.max(1)).sqrt();
                return Ok(EvalResult {
                    value: sum.value(),
                    method: EvalMethod::Series,
                    est_abs_error: shell_max + noise,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        shells: kmax,
        last_shell: last_shell.to_f64().unwrap_or(f64::NAN),
    })
}

/// Large-|z_1| expansion with p ∈ {1, 2} algebraic terms:
///
/// ```text
/// E ≈ − (1/z_1) / Γ(β0 − β1)
///     − (1/z_1²) [ 1/Γ(β0 − 2β1) − Σ_{j≥2} z_j / Γ(β0 − 2β1 + β_j) ]
/// ```
///
/// 1/Γ at nonpositive integers is exactly zero, so terms sitting on poles
/// drop out. Coefficients of order three and higher have no closed form
/// here, which is why p stops at 2; `est_abs_error` is the computed
/// next-order coefficient bound over |z_1|^{p+1}.
pub fn mlf_asymptotic<T: Real>(
    params: &MLParams<T>,
    args: &MLArguments<T>,
    p: usize,
) -> Result<EvalResult<T>> {
    check_shapes(params, args)?;
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidOrder(format!("asymptotic term count p must be 1 or 2, got {p}")));
    }
    let z1 = args.z[0];
    let min_abs = MlfConfig::<T>::default().asym_min;
    if z1.abs() < min_abs {
        return Err(Error::SmallArgument {
            z1_abs: z1.abs().to_f64().unwrap_or(f64::NAN),
            min_abs: min_abs.to_f64().unwrap_or(f64::NAN),
        });
    }
    let b0 = params.beta0;
    let b1 = params.betas[0];
    let inv_z1 = z1.recip();
    let two = T::of(2.0);
    let three = T::of(3.0);

    let first = -inv_z1 * recip_gamma(b0 - b1);
    let (value, next_order) = if p == 1 {
        let mut c2 = recip_gamma(b0 - two * b1).abs();
        for (j, &zj) in args.z.iter().enumerate().skip(1) {
            c2 += (zj * recip_gamma(b0 - two * b1 + params.betas[j])).abs();
        }
        (first, (c2 + T::one()) / (z1 * z1).abs())
    } else {
        let mut second = recip_gamma(b0 - two * b1);
        for (j, &zj) in args.z.iter().enumerate().skip(1) {
            second = second - zj * recip_gamma(b0 - two * b1 + params.betas[j]);
        }
        let value = first - inv_z1 * inv_z1 * second;
        let mut c3 = recip_gamma(b0 - three * b1).abs();
        for (j, &zj) in args.z.iter().enumerate().skip(1) {
            c3 += two * (zj * recip_gamma(b0 - three * b1 + params.betas[j])).abs();
        }
        for (j, &zj) in args.z.iter().enumerate().skip(1) {
            for (l, &zl) in args.z.iter().enumerate().skip(j) {
                c3 += (zj * zl * recip_gamma(b0 - three * b1 + params.betas[j] + params.betas[l])).abs();
            }
        }
        (value, (c3 + T::one()) / (z1 * z1 * z1).abs())
    };
    Ok(EvalResult { value, method: EvalMethod::Asymptotic, est_abs_error: next_order })
}

/// Parabolic-contour quadrature of the Hankel-loop representation. Valid at
/// every argument scale for z_j ≤ 0; used where the series is unsafe and
/// the asymptotic expansion is not yet accurate.
pub fn mlf_contour<T: Real>(
    params: &MLParams<T>,
    args: &MLArguments<T>,
    nodes: usize,
) -> Result<EvalResult<T>> {
    check_shapes(params, args)?;
    if !(8..=512).contains(&nodes) {
        return Err(Error::InvalidParams(format!("contour node count must be in 8..=512, got {nodes}")));
    }
    let b0 = params.beta0;
    let betas = params.betas.clone();
    let zs = args.z.clone();
    let g = move |s: Complex<T>| {
        let mut den = Complex::new(T::one(), T::zero());
        for (&b, &z) in betas.iter().zip(&zs) {
            den = den - s.powf(-b).scale(z);
        }
        s.powf(-b0) / den
    };
    let value = hankel_parabola(g, nodes);
    if !value.is_finite() {
        return Err(Error::ContourFailure);
    }
    // validated against the series and reference identities in the tests;
    // the additive part is the rule's absolute rounding floor ~ e^{vertex} eps
    let est = value.abs() * T::of(1e-11) + T::of(1e-13);
    Ok(EvalResult { value, method: EvalMethod::Contour, est_abs_error: est })
}

/// Dispatching evaluator with the default configuration.
pub fn mlf_eval<T: Real>(params: &MLParams<T>, args: &MLArguments<T>) -> Result<EvalResult<T>> {
    mlf_eval_with(&MlfConfig::default(), params, args)
}

/// Dispatching evaluator: series in its safe zone, the p = 2 expansion for
/// |z_1| ≥ `z_switch`, contour quadrature in between. Total by
/// construction; every admissible argument takes exactly one branch.
pub fn mlf_eval_with<T: Real>(
    cfg: &MlfConfig<T>,
    params: &MLParams<T>,
    args: &MLArguments<T>,
) -> Result<EvalResult<T>> {
    check_shapes(params, args)?;
    if series_peak_exponent(params, args) <= cfg.series_peak_max {
        mlf_series(params, args, cfg.series_tol, cfg.series_kmax)
    } else if args.z[0].abs() >= cfg.z_switch {
        mlf_asymptotic(params, args, 2)
    } else {
        mlf_contour(params, args, cfg.contour_nodes)
    }
}

fn check_mode<T: Real>(lambda: T) -> Result<()> {
    if !(lambda.is_finite() && lambda > T::zero()) {
        return Err(Error::InvalidParams(format!("eigenvalue must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Relaxation factor ω(t; λ) = 1 − λ t^{ρ_1} E_(β'),ρ_1+1(−λt^{ρ_1}, …):
/// the decay of the λ-mode of the initial data. ω(0; λ) = 1 exactly;
/// ω decreases toward 0 like (λ t^{ρ_1})^{−1} Σ_j q_j t^{ρ_1−ρ_j}/Γ(1−ρ_j).
pub fn relaxation<T: Real>(orders: &FractionalOrders<T>, lambda: T, t: T) -> Result<T> {
    relaxation_with(&MlfConfig::default(), orders, lambda, t)
}

pub fn relaxation_with<T: Real>(
    cfg: &MlfConfig<T>,
    orders: &FractionalOrders<T>,
    lambda: T,
    t: T,
) -> Result<T> {
    check_mode(lambda)?;
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::InvalidParams(format!("time must be finite and >= 0, got {t}")));
    }
    if t == T::zero() {
        return Ok(T::one());
    }
    let params = MLParams::relaxation_kernel(orders);
    let args = MLArguments::new(orders.kernel_arguments(lambda, t))?;
    let scale = lambda * t.powf(orders.rho1());

    if series_peak_exponent(&params, &args) <= cfg.series_peak_max {
        // 1 − λt^{ρ1} E: at series-safe scales the subtraction loses at most
        // a digit, so the composite stays accurate
        let e = mlf_series(&params, &args, cfg.series_tol, cfg.series_kmax)?;
        return Ok(T::one() - scale * e.value);
    }
    if scale >= cfg.omega_asym_min {
        return relaxation_asymptotic(orders, lambda, t);
    }
    // Contour quadrature of the relaxation function's own transform
    // (Σ_j a_j σ^{ρ_j − 1}) / (Σ_j a_j σ^{ρ_j} + λ t^{ρ_1}) with
    // a_j = q_j t^{ρ_1 − ρ_j}: no 1 − (1 − ω) cancellation, so relative
    // accuracy survives ω ≪ 1.
    let rho1 = orders.rho1();
    let coeffs: Vec<(T, T)> = orders
        .rhos()
        .iter()
        .zip(orders.weights())
        .map(|(&r, &q)| (q * t.powf(rho1 - r), r))
        .collect();
    let g = move |s: Complex<T>| {
        let mut num = Complex::new(T::zero(), T::zero());
        let mut den = Complex::new(scale, T::zero());
        for &(a, r) in &coeffs {
            let sp = s.powf(r);
            num = num + (sp / s).scale(a);
            den = den + sp.scale(a);
        }
        num / den
    };
    let omega = hankel_parabola(g, cfg.contour_nodes);
    if !omega.is_finite() {
        return Err(Error::ContourFailure);
    }
    Ok(omega)
}

/// Closed large-argument form of the relaxation factor,
/// ω ≈ (λ t^{ρ_1})^{−1} Σ_j q_j t^{ρ_1 − ρ_j} / Γ(1 − ρ_j).
/// Relative error decays like 1/(λ t^{ρ_1}); [`relaxation`] only dispatches
/// here above `omega_asym_min`.
pub fn relaxation_asymptotic<T: Real>(orders: &FractionalOrders<T>, lambda: T, t: T) -> Result<T> {
    check_mode(lambda)?;
    if !(t.is_finite() && t > T::zero()) {
        return Err(Error::InvalidParams(format!("time must be positive, got {t}")));
    }
    let rho1 = orders.rho1();
    let mut acc = T::zero();
    for (&r, &q) in orders.rhos().iter().zip(orders.weights()) {
        acc += q * t.powf(rho1 - r) * recip_gamma(T::one() - r);
    }
    Ok(acc / (lambda * t.powf(rho1)))
}

/// Independent check of [`relaxation`]: fixed-Talbot inversion of the
/// Laplace transform (Σ_j q_j s^{ρ_j − 1}) / (Σ_j q_j s^{ρ_j} + λ) at time
/// t > 0. Shares no code path with the series, the parabolic rule, or the
/// asymptotic form.
pub fn relaxation_oracle<T: Real>(orders: &FractionalOrders<T>, lambda: T, t: T) -> Result<T> {
    relaxation_oracle_with(&MlfConfig::default(), orders, lambda, t)
}

pub fn relaxation_oracle_with<T: Real>(
    cfg: &MlfConfig<T>,
    orders: &FractionalOrders<T>,
    lambda: T,
    t: T,
) -> Result<T> {
    check_mode(lambda)?;
    if !(t.is_finite() && t > T::zero()) {
        return Err(Error::InvalidParams(format!("oracle time must be positive, got {t}")));
    }
    let rhos = orders.rhos().to_vec();
    let weights = orders.weights().to_vec();
    let fhat = move |s: Complex<T>| {
        let mut num = Complex::new(T::zero(), T::zero());
        let mut den = Complex::new(lambda, T::zero());
        for (&r, &q) in rhos.iter().zip(&weights) {
            let sp = s.powf(r);
            num = num + (sp / s).scale(q);
            den = den + sp.scale(q);
        }
        num / den
    };
    let omega = talbot_inverse(fhat, t, cfg.talbot_nodes);
    if !omega.is_finite() {
        return Err(Error::ContourFailure);
    }
    Ok(omega)
}

/// Propagation kernel ξ^{ρ_1 − 1} E_(β'),ρ_1(−λξ^{ρ_1}, …) for ξ > 0: the
/// weight with which a source impulse ξ in the past acts on the λ-mode.
/// Integrable at 0, bounded by C ξ^{ρ_1 − 1}/(1 + λξ^{ρ_1}).
pub fn propagator<T: Real>(orders: &FractionalOrders<T>, lambda: T, xi: T) -> Result<T> {
    propagator_with(&MlfConfig::default(), orders, lambda, xi)
}

pub fn propagator_with<T: Real>(
    cfg: &MlfConfig<T>,
    orders: &FractionalOrders<T>,
    lambda: T,
    xi: T,
) -> Result<T> {
    check_mode(lambda)?;
    if !(xi.is_finite() && xi > T::zero()) {
        return Err(Error::InvalidParams(format!("kernel argument must be positive, got {xi}")));
    }
    let params = MLParams::propagation_kernel(orders);
    let args = MLArguments::new(orders.kernel_arguments(lambda, xi))?;
    let e = mlf_eval_with(cfg, &params, &args)?;
    Ok(xi.powf(orders.rho1() - T::one()) * e.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn orders2() -> FractionalOrders<f64> {
        FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn orders_constructor_rejects_bad_input() {
        assert!(FractionalOrders::<f64>::new(vec![], vec![]).is_err());
        assert!(FractionalOrders::new(vec![0.5, 0.8], vec![1.0, 1.0]).is_err()); // not decreasing
        assert!(FractionalOrders::new(vec![0.5, 0.5], vec![1.0, 1.0]).is_err()); // tie
        assert!(FractionalOrders::new(vec![1.0], vec![1.0]).is_err()); // 1 needs relaxed
        assert!(FractionalOrders::new(vec![0.5], vec![2.0]).is_err()); // q1 != 1
        assert!(FractionalOrders::new(vec![0.8, 0.4], vec![1.0, -1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.8, 0.4], vec![1.0]).is_err()); // length
        assert!(FractionalOrders::new_relaxed(vec![1.0], vec![1.0]).is_ok());
        assert!(FractionalOrders::new_relaxed(vec![1.2], vec![1.0]).is_err());
    }

    #[test]
    fn kernel_shapes() {
        let o = orders2();
        assert_eq!(o.kernel_exponents(), vec![0.8, 0.8 - 0.4]);
        let z = o.kernel_arguments(2.0, 1.0);
        assert_eq!(z, vec![-2.0, -1.0]);
        let z0 = o.kernel_arguments(2.0, 0.0);
        assert_eq!(z0, vec![0.0, 0.0]);
    }

    #[test]
    fn arguments_reject_positive_or_nan() {
        assert!(MLArguments::new(vec![0.5f64]).is_err());
        assert!(MLArguments::new(vec![f64::NAN]).is_err());
        assert!(MLArguments::new(vec![-1.0, 0.0]).is_ok());
    }

    #[test]
    fn series_at_zero_is_reciprocal_gamma() {
        for beta0 in [0.6f64, 1.0, 1.8] {
            let p = MLParams::new(beta0, vec![0.5]).unwrap();
            let a = MLArguments::new(vec![0.0]).unwrap();
            let r = mlf_series(&p, &a, 1e-14, 400).unwrap();
            assert_relative_eq!(r.value, recip_gamma(beta0), max_relative = 1e-14);
        }
    }

    #[test]
    fn series_reduces_to_exponential_at_unit_order() {
        let p = MLParams::new_relaxed(1.0, vec![1.0]).unwrap();
        let a = MLArguments::new(vec![-1.0]).unwrap();
        let r = mlf_series(&p, &a, 1e-14, 400).unwrap();
        assert_relative_eq!(r.value, (-1.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn series_matches_erfc_identity() {
        let p = MLParams::new(1.0, vec![0.5]).unwrap();
        let a = MLArguments::new(vec![-1.0]).unwrap();
        let r = mlf_series(&p, &a, 1e-14, 400).unwrap();
        assert_relative_eq!(r.value, crate::oracle::erfcx(1.0), max_relative = 1e-12);
    }

    #[test]
    fn series_matches_multinomial_references() {
        // 40-digit references for E_{(0.8,0.4),1.8}(z1, -1)
        let p = MLParams::new(1.8, vec![0.8, 0.4]).unwrap();
        for (z1, expect) in [
            (-0.5, 0.4706328789407766685034),
            (-1.0, 0.3972570359544860105397),
        ] {
            let a = MLArguments::new(vec![z1, -1.0]).unwrap();
            let r = mlf_series(&p, &a, 1e-14, 400).unwrap();
            assert_relative_eq!(r.value, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn series_with_zero_trailing_argument_reduces_to_single_term() {
        let p = MLParams::new(1.3, vec![0.7, 0.3]).unwrap();
        let a = MLArguments::new(vec![-2.0, 0.0]).unwrap();
        let r = mlf_series(&p, &a, 1e-14, 400).unwrap();
        let single = crate::oracle::classical_mittag_leffler(0.7, 1.3, -2.0).unwrap();
        assert_relative_eq!(r.value, single, max_relative = 1e-11);
    }

    #[test]
    fn series_reports_no_convergence_on_tiny_budget() {
        let p = MLParams::new(1.0, vec![0.5]).unwrap();
        let a = MLArguments::new(vec![-5.0]).unwrap();
        match mlf_series(&p, &a, 1e-14, 3) {
            Err(Error::NoConvergence { shells: 3, .. }) => {}
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn series_reports_instability_on_overflowing_terms() {
        let p = MLParams::new(1.0, vec![0.3]).unwrap();
        let a = MLArguments::new(vec![-60.0]).unwrap();
        match mlf_series(&p, &a, 1e-14, 4000) {
            Err(Error::SeriesUnstable { .. }) => {}
            other => panic!("expected SeriesUnstable, got {other:?}"),
        }
    }

    #[test]
    fn asymptotic_rejects_bad_order_and_small_argument() {
        let p = MLParams::new(1.8, vec![0.8, 0.4]).unwrap();
        let a = MLArguments::new(vec![-1e3, -1.0]).unwrap();
        assert!(matches!(mlf_asymptotic(&p, &a, 0), Err(Error::InvalidOrder(_))));
        assert!(matches!(mlf_asymptotic(&p, &a, 3), Err(Error::InvalidOrder(_))));
        let small = MLArguments::new(vec![-5.0, -1.0]).unwrap();
        assert!(matches!(mlf_asymptotic(&p, &small, 2), Err(Error::SmallArgument { .. })));
    }

    #[test]
    fn asymptotic_first_term_matches_closed_form() {
        // p = 1 at z1 = -1e6, beta0 = 1.9, beta = 0.8:
        // E ≈ 1e-6 / Γ(1.1) = 1.051137006111778e-6 (40-digit value)
        let p = MLParams::new(1.9, vec![0.8]).unwrap();
        let a = MLArguments::new(vec![-1e6]).unwrap();
        let r = mlf_asymptotic(&p, &a, 1).unwrap();
        assert_relative_eq!(r.value, 1.051137006111778e-6, max_relative = 1e-12);
        assert!(r.est_abs_error < 1e-10);
    }

    #[test]
    fn contour_matches_series_in_the_safe_zone() {
        let cases: Vec<(MLParams<f64>, Vec<f64>)> = vec![
            (MLParams::new(1.0, vec![0.5]).unwrap(), vec![-1.0]),
            (MLParams::new(1.8, vec![0.8, 0.4]).unwrap(), vec![-1.0, -1.0]),
            (MLParams::new(0.8, vec![0.8, 0.5, 0.2]).unwrap(), vec![-0.7, -0.4, -0.9]),
            (MLParams::new(1.4, vec![0.6]).unwrap(), vec![0.0]),
        ];
        for (p, z) in cases {
            let a = MLArguments::new(z).unwrap();
            let s = mlf_series(&p, &a, 1e-14, 400).unwrap();
            let c = mlf_contour(&p, &a, 48).unwrap();
            assert_relative_eq!(c.value, s.value, max_relative = 1e-11);
            assert!((c.value - s.value).abs() <= c.est_abs_error + s.est_abs_error);
        }
    }

    #[test]
    fn contour_matches_multinomial_references_beyond_series_reach() {
        let p = MLParams::new(1.8, vec![0.8, 0.4]).unwrap();
        for (z1, expect) in [
            (-2.0, 0.2977096052334054426268),
            (-4.0, 0.193003700951702008075),
        ] {
            let a = MLArguments::new(vec![z1, -1.0]).unwrap();
            let c = mlf_contour(&p, &a, 48).unwrap();
            assert_relative_eq!(c.value, expect, max_relative = 1e-11);
        }
    }

    #[test]
    fn eval_dispatch_chooses_the_documented_branches() {
        let p = MLParams::new(1.8, vec![0.8, 0.4]).unwrap();
        let small = MLArguments::new(vec![-0.5, -0.5]).unwrap();
        let mid = MLArguments::new(vec![-100.0, -1.0]).unwrap();
        let large = MLArguments::new(vec![-1e5, -1.0]).unwrap();
        assert_eq!(mlf_eval(&p, &small).unwrap().method, EvalMethod::Series);
        assert_eq!(mlf_eval(&p, &mid).unwrap().method, EvalMethod::Contour);
        assert_eq!(mlf_eval(&p, &large).unwrap().method, EvalMethod::Asymptotic);
    }

    #[test]
    fn eval_branches_agree_at_the_switch_boundary() {
        let cfg = MlfConfig::<f64>::default();
        let p = MLParams::new(1.8, vec![0.8, 0.4]).unwrap();
        let a = MLArguments::new(vec![-cfg.z_switch, -1.0]).unwrap();
        let c = mlf_contour(&p, &a, cfg.contour_nodes).unwrap();
        let asy = mlf_asymptotic(&p, &a, 2).unwrap();
        assert_relative_eq!(c.value, asy.value, max_relative = 1e-6);
    }

    #[test]
    fn eval_reports_erfc_identity_value() {
        // E_{1/2,1}(-4) = e^16 erfc(4) = 0.1369994576250614 (40-digit value)
        let p = MLParams::new(1.0, vec![0.5]).unwrap();
        let a = MLArguments::new(vec![-4.0]).unwrap();
        let r = mlf_eval(&p, &a).unwrap();
        assert_relative_eq!(r.value, 0.1369994576250614, max_relative = 1e-11);
    }

    #[test]
    fn relaxation_is_one_at_time_zero_exactly() {
        let o = orders2();
        assert_eq!(relaxation(&o, 7.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn relaxation_reduces_to_classical_mittag_leffler() {
        // M = 1: ω(t; λ) = E_{ρ,1}(−λ t^ρ)
        let o = FractionalOrders::single(0.5f64).unwrap();
        let got = relaxation(&o, 1.0, 1.0).unwrap();
        assert_relative_eq!(got, crate::oracle::erfcx(1.0), max_relative = 1e-12);
        let got = relaxation(&o, 9.0, 1.0).unwrap();
        assert_relative_eq!(got, crate::oracle::erfcx(9.0), max_relative = 1e-11);
    }

    #[test]
    fn relaxation_matches_exponential_in_the_classical_limit() {
        let o = FractionalOrders::new_relaxed(vec![1.0f64], vec![1.0]).unwrap();
        for (lam, t) in [(3.0, 1.0), (1.0, 0.5), (9.0, 1.0)] {
            let got = relaxation(&o, lam, t).unwrap();
            assert_relative_eq!(got, (-lam * t).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn relaxation_matches_two_term_reference() {
        // ω(1; 2) for ρ = (0.8, 0.4), q = (1, 1): 40-digit reference
        let o = orders2();
        let got = relaxation(&o, 2.0, 1.0).unwrap();
        assert_relative_eq!(got, 0.4045807895331891147465, max_relative = 1e-11);
    }

    #[test]
    fn relaxation_approaches_its_asymptotic_form() {
        let o = orders2();
        let lam = 1e6;
        let exact = relaxation(&o, lam, 1.0).unwrap();
        let asym = relaxation_asymptotic(&o, lam, 1.0).unwrap();
        // closed form error ~ 1/λ here
        assert_relative_eq!(exact, asym, max_relative = 1e-4);
        // and the closed form itself: 1e-6 (1/Γ(0.2) + 1/Γ(0.6))
        assert_relative_eq!(asym, 1e-6 * 0.8893298566537406, max_relative = 1e-12);
    }

    #[test]
    fn relaxation_agrees_with_talbot_oracle_on_a_spot_grid() {
        for o in [
            FractionalOrders::single(0.5f64).unwrap(),
            orders2(),
            FractionalOrders::new(vec![0.9, 0.6, 0.2], vec![1.0, 0.5, 2.0]).unwrap(),
        ] {
            for lam in [0.3, 5.0, 400.0] {
                for t in [0.2, 1.0, 3.0] {
                    let a = relaxation(&o, lam, t).unwrap();
                    let b = relaxation_oracle(&o, lam, t).unwrap();
                    assert_relative_eq!(a, b, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn relaxation_is_positive_decreasing_and_bounded_by_one() {
        let o = orders2();
        let mut prev = relaxation(&o, 4.0, 0.0).unwrap();
        assert_eq!(prev, 1.0);
        for i in 1..=40 {
            let t = i as f64 * 0.25;
            let w = relaxation(&o, 4.0, t).unwrap();
            assert!(w > 0.0 && w < prev, "not strictly decreasing at t={t}: {w} vs {prev}");
            prev = w;
        }
        // decreasing in λ at fixed t as well
        let mut prev = relaxation(&o, 0.5, 1.0).unwrap();
        for lam in [1.0, 2.0, 4.0, 8.0, 64.0, 512.0] {
            let w = relaxation(&o, lam, 1.0).unwrap();
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn propagator_reduces_to_exponential_in_the_classical_limit() {
        let o = FractionalOrders::new_relaxed(vec![1.0f64], vec![1.0]).unwrap();
        let got = propagator(&o, 2.0, 1.0).unwrap();
        assert_relative_eq!(got, (-2.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn propagator_has_the_weak_singularity_scaling_near_zero() {
        // ξ^{ρ1-1} E(0) = ξ^{ρ1-1}/Γ(ρ1) as ξ → 0; the largest neglected
        // term is O(ξ^{ρ1-ρ2}) = O(1e-7) here
        let o = orders2();
        let xi = 1e-16;
        let got = propagator(&o, 3.0, xi).unwrap();
        let lead = xi.powf(-0.2) / crate::gamma::gamma(0.8);
        assert_relative_eq!(got, lead, max_relative = 1e-5);
    }

    #[test]
    fn kernel_ops_reject_out_of_domain_input() {
        let o = orders2();
        assert!(relaxation(&o, 0.0, 1.0).is_err());
        assert!(relaxation(&o, -1.0, 1.0).is_err());
        assert!(relaxation(&o, 1.0, -0.1).is_err());
        assert!(propagator(&o, 1.0, 0.0).is_err());
        assert!(relaxation_oracle(&o, 1.0, 0.0).is_err());
        assert!(relaxation_asymptotic(&o, 1.0, 0.0).is_err());
    }

    #[test]
    fn f32_instantiation_tracks_f64_coarsely() {
        let o32 = FractionalOrders::<f32>::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let o64 = orders2();
        let w32 = relaxation(&o32, 2.0f32, 1.0).unwrap();
        let w64 = relaxation(&o64, 2.0f64, 1.0).unwrap();
        assert!((w32 as f64 - w64).abs() < 1e-3, "{w32} vs {w64}");
    }
}
