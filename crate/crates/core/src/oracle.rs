//! Independent reference evaluators used to validate the main code paths.
//!
//! Nothing in here is called by the solvers. The point of the module is to
//! provide values computed by *different* mathematics than the production
//! evaluators so that agreement between the two is evidence of correctness:
//!
//! * [`erfcx`] gives E_{1/2,1}(z) = erfcx(−z) through the error function,
//!   with no gamma function and no series shared with the main path.
//! * [`classical_mittag_leffler`] evaluates the single-parameter-family
//!   E_{α,β}(z) for z ≤ 0 by the real-axis integral representation
//!   (spectral density of the completely monotone function), falling back
//!   to the plain power series only where that is numerically safe.

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::scalar::{KahanSum, Real};

/// Scaled complementary error function e^{x^2} erfc(x) for x ≥ 0.
pub fn erfcx<T: Real>(x: T) -> T {
    debug_assert!(x >= T::zero());
    if x < T::of(1.5) {
        // e^{x^2} (1 - erf x) with the Taylor series for erf
        let two_over_sqrt_pi = T::of(2.0) / T::PI().sqrt();
        let x2 = x * x;
        let mut term = x;
        let mut acc = KahanSum::new();
        acc.add(x);
        let mut n = 1usize;
        loop {
            // term_n = (-1)^n x^{2n+1} / (n! (2n+1))
            let nf = T::of_usize(n);
            term = -term * x2 / nf;
            let contrib = term / (T::of(2.0) * nf + T::one());
            acc.add(contrib);
            if contrib.abs() < T::epsilon() * acc.value().abs() {
                break;
            }
            n += 1;
            if n > 200 {
                break;
            }
        }
        x2.exp() * (T::one() - two_over_sqrt_pi * acc.value())
    } else {
        // Laplace continued fraction, evaluated by the modified Lentz scheme:
        // erfcx(x) = (1/sqrt(pi)) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = T::of(1e-300);
        let mut f = x;
        let mut c = f;
        let mut d = T::zero();
        let mut m = 1usize;
        loop {
            let a = T::of_usize(m) * T::of(0.5);
            d = x + a * d;
            if d == T::zero() {
                d = tiny;
            }
            c = x + a / c;
            if c == T::zero() {
                c = tiny;
            }
            d = d.recip();
            let delta = c * d;
            f = f * delta;
            if (delta - T::one()).abs() < T::epsilon() {
                break;
            }
            m += 1;
            if m > 300 {
                break;
            }
        }
        (T::PI().sqrt() * f).recip()
    }
}

/// Classical two-parameter Mittag-Leffler E_{α,β}(z) for z ≤ 0,
/// α ∈ (0, 1), β ∈ (0, 2).
pub fn classical_mittag_leffler<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidOrder(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(beta > T::zero() && beta < T::of(2.0)) {
        return Err(Error::InvalidOrder(format!("beta must lie in (0,2), got {beta}")));
    }
    if !(z <= T::zero() && z.is_finite()) {
        return Err(Error::InvalidParams(format!("z must be finite and <= 0, got {z}")));
    }
    // The power series loses all digits once its peak term ~ e^{|z|^{1/alpha}}
    // overwhelms the O(1) result; keep it only while that exponent is small.
    let peak = z.abs().powf(alpha.recip());
    if peak <= T::of(7.0) {
        Ok(series(alpha, beta, z))
    } else {
        Ok(spectral_integral(alpha, beta, z))
    }
}

fn series<T: Real>(alpha: T, beta: T, z: T) -> T {
    let mut acc = KahanSum::new();
    let ln_abs_z = if z == T::zero() { T::neg_infinity() } else { z.abs().ln() };
    for k in 0..400usize {
        let kf = T::of_usize(k);
        let term = if k == 0 {
            crate::gamma::recip_gamma(beta)
        } else {
            let magnitude = (kf * ln_abs_z - crate::gamma::ln_gamma(beta + alpha * kf)).exp();
            if k % 2 == 0 {
                magnitude
            } else {
                -magnitude
            }
        };
        acc.add(term);
        if k > 2 && term.abs() < T::epsilon() * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

/// Real-axis representation, valid for 0 < α < 1, 0 < β < 1 + α, z < 0:
///
///   E_{α,β}(z) = ∫_0^∞ K(χ) dχ,
///   K(χ) = (1/(απ)) χ^{(1−β)/α} e^{−χ^{1/α}}
///          · [χ sin(π(1−β)) − z sin(π(1−β+α))] / (χ² − 2χz cos(απ) + z²).
///
/// The denominator is bounded below by z² sin²(απ) > 0, so the integrand is
/// smooth away from 0 and decays super-exponentially.
fn spectral_integral<T: Real>(alpha: T, beta: T, z: T) -> T {
    let pi = T::PI();
    let s1 = (pi * (T::one() - beta)).sin();
    let s2 = (pi * (T::one() - beta + alpha)).sin();
    let c = (alpha * pi).cos();
    let kernel = |chi: T| -> T {
        if chi <= T::zero() {
            return T::zero();
        }
        let num = chi * s1 - z * s2;
        let den = chi * chi - T::of(2.0) * chi * z * c + z * z;
        let weight = chi.powf((T::one() - beta) / alpha) * (-chi.powf(alpha.recip())).exp();
        weight * num / (alpha * pi * den)
    };
    // decay scale: e^{-χ^{1/α}} < 1e-20 once χ > 46^α; panel geometrically
    // from below the spike at χ ~ |z| up to the decay cutoff
    let chi_max = T::of(46.0).powf(alpha).max(z.abs() * T::of(4.0)) + T::one();
    let gl = GaussLegendre::new(16).expect("16-node rule is supported");
    let mut acc = KahanSum::new();
    // graded panels toward 0 pick up the χ→0 behavior of the weight
    acc.add(gl.integrate_graded(z.abs().min(T::one()), 52, kernel));
    // log-spaced panels across the spike and the tail
    let mut lo = z.abs().min(T::one());
    let ratio = T::of(1.35);
    while lo < chi_max {
        let hi = (lo * ratio).min(chi_max);
        acc.add(gl.integrate(lo, hi, kernel));
        lo = hi;
    }
    acc.value()
}
