//! Deformed-contour quadratures used by the Mittag-Leffler evaluators.
//!
//! Two independent rules live here:
//!
//! * [`hankel_parabola`]: trapezoid discretization of a Hankel-loop integral
//!   (1/2πi) ∮ e^σ g(σ) dσ on the parabola σ(u) = a(1 + iu)^2. The contour
//!   starts at Re σ = −∞ below the branch cut, rounds the origin at σ = a
//!   and returns above the cut, so it is admissible for integrands with a
//!   cut on the negative real axis and no other singularities off it.
//! * [`talbot_inverse`]: the fixed-Talbot rule on the cotangent contour for
//!   inverting a Laplace transform at a single time. Kept deliberately
//!   separate from the parabola (different contour family, different
//!   parameterization) so the two can serve as cross-checks of each other.

use num_complex::Complex;

use crate::scalar::Real;

/// Trapezoid step is chosen so the truncated tail and the discretization
/// error are both far below f64 round-off for any node count >= 24.
const PARABOLA_VERTEX: f64 = 8.5;
const PARABOLA_HALF_WIDTH: f64 = 3.0;

/// Evaluates (1/2πi) ∮ e^σ g(σ) dσ over the parabolic Hankel loop.
///
/// `g` must map conjugates to conjugates (real coefficients) and be analytic
/// off the negative real axis; the result is then real. Returns a non-finite
/// number if `g` misbehaves; callers translate that into an error.
pub fn hankel_parabola<T, F>(g: F, nodes: usize) -> T
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let a = T::of(PARABOLA_VERTEX);
    let h = T::of(PARABOLA_HALF_WIDTH) / T::of_usize(nodes);
    let mut acc = crate::scalar::KahanSum::new();
    for k in 0..nodes {
        let u = (T::of_usize(k) + T::of(0.5)) * h;
        // σ = a (1 + iu)^2 = a(1 - u^2) + 2iau
        let sigma = Complex::new(a * (T::one() - u * u), T::of(2.0) * a * u);
        let dsig = Complex::new(T::one(), u); // direction factor (1 + iu)
        let val = sigma.exp() * g(sigma) * dsig;
        acc.add(val.re);
    }
    T::of(2.0) * a * h / T::PI() * acc.value()
}

/// Fixed-Talbot inversion of a Laplace transform at time t > 0.
///
/// The contour is s(θ) = r θ (cot θ + i), θ ∈ (−π, π), with r = 2n/(5t);
/// the quadrature uses the real-axis symmetry so only θ_k = kπ/n, k < n,
/// appear. Suitable for transforms whose singularities lie on the closed
/// negative real axis.
pub fn talbot_inverse<T, F>(fhat: F, t: T, nodes: usize) -> T
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    debug_assert!(t > T::zero());
    let n = nodes.max(8);
    let r = T::of(2.0) * T::of_usize(n) / (T::of(5.0) * t);
    let mut acc = crate::scalar::KahanSum::new();
    // θ = 0 endpoint: s = r, weight 1/2
    acc.add(T::of(0.5) * (r * t).exp() * fhat(Complex::new(r, T::zero())).re);
    for k in 1..n {
        let theta = T::PI() * T::of_usize(k) / T::of_usize(n);
        let cot = theta.cos() / theta.sin();
        let s = Complex::new(r * theta * cot, r * theta);
        // ν(θ) = θ + (θ cot θ − 1) cot θ
        let nu = theta + (theta * cot - T::one()) * cot;
        let w = Complex::new(T::one(), nu);
        let val = (s * Complex::new(t, T::zero())).exp() * fhat(s) * w;
        acc.add(val.re);
    }
    r / T::of_usize(n) * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    #[test]
    fn parabola_reproduces_reciprocal_gamma() {
        // (1/2πi) ∮ e^σ σ^(-β) dσ = 1/Γ(β)
        for beta in [0.3f64, 0.8, 1.0, 1.5, 2.4] {
            let got = hankel_parabola(|s: Complex<f64>| s.powf(-beta), 48);
            assert_relative_eq!(got, crate::gamma::recip_gamma(beta), max_relative = 1e-12);
        }
    }

    #[test]
    fn parabola_reproduces_exponential_through_simple_pole() {
        // (1/2πi) ∮ e^σ / (σ + c) dσ = e^{-c}, pole enclosed by the loop.
        // The rule's rounding noise floor is ~ e^{vertex} eps ≈ 1e-13
        // absolute, which dominates once the target is itself small.
        for c in [0.5f64, 2.0, 9.0] {
            let got = hankel_parabola(|s: Complex<f64>| (s + c).inv(), 48);
            assert_relative_eq!(got, (-c).exp(), max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn parabola_stable_across_node_counts() {
        let g = |s: Complex<f64>| s.powf(-1.3) / (1.0 + 4.0 * s.powf(-0.7));
        let v48 = hankel_parabola(g, 48);
        let v32 = hankel_parabola(g, 32);
        let v64 = hankel_parabola(g, 64);
        assert_relative_eq!(v48, v32, max_relative = 1e-12);
        assert_relative_eq!(v48, v64, max_relative = 1e-12);
    }

    #[test]
    fn talbot_inverts_elementary_transforms() {
        // 1/(s+λ) -> e^{-λt}; the fixed rule amplifies rounding by
        // e^{rt} = e^{2·nodes/5}, so exponentially small targets see a
        // relative error near e^{2·nodes/5} eps / e^{-λt}
        for (lam, t) in [(1.0f64, 0.7), (3.0, 1.0), (0.25, 2.0)] {
            let got = talbot_inverse(|s: Complex<f64>| (s + lam).inv(), t, 32);
            assert_relative_eq!(got, (-lam * t).exp(), max_relative = 1e-8);
        }
        // 1/s^2 -> t
        let got = talbot_inverse(|s: Complex<f64>| (s * s).inv(), 1.5, 32);
        assert_relative_eq!(got, 1.5, max_relative = 1e-10);
        // s^(ρ-1)/s^ρ = 1/s -> 1
        let got = talbot_inverse(|s: Complex<f64>| s.inv(), 0.3, 32);
        assert_relative_eq!(got, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn f32_instantiation_compiles_and_is_coarsely_right() {
        let got: f32 = hankel_parabola(|s: Complex<f32>| (s + 1.0f32).inv(), 32);
        assert!((got - (-1.0f32).exp()).abs() < 1e-3, "got {got}");
    }
}
