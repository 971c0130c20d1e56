//! Gamma-function utilities: log-gamma, gamma, and the reciprocal 1/Γ.
//!
//! The solvers need Γ at arbitrary positive arguments (series denominators)
//! and 1/Γ at arguments that may be zero or negative (asymptotic expansion
//! coefficients). 1/Γ is entire; at nonpositive integers it is exactly zero
//! and is returned as such, so expansion terms that sit on a pole of Γ drop
//! out instead of turning into NaN.
//!
//! Implemented with the 9-term Lanczos approximation (g = 7), accurate to
//! about 1e-14 relative in `f64` over the range used here. Hand-rolled
//! rather than taken from a stats crate because the whole core is generic
//! over the scalar type; the dev-tests cross-check against `statrs`.

use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> T {
    debug_assert!(x > T::zero(), "ln_gamma domain is x > 0, got {x}");
    if x < T::of(0.5) {
        // reflection: ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        let pix = T::PI() * x;
        return (T::PI() / pix.sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::of(c) / (x + T::of_usize(i));
    }
    let t = x + T::of(LANCZOS_G + 0.5);
    let half = T::of(0.5);
    half * (T::of(2.0) * T::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// Γ(x) for x > 0.
pub fn gamma<T: Real>(x: T) -> T {
    ln_gamma(x).exp()
}

/// 1/Γ(x) for any real x. Exactly zero at x = 0, −1, −2, … .
pub fn recip_gamma<T: Real>(x: T) -> T {
    if x <= T::zero() && x == x.floor() {
        return T::zero();
    }
    if x >= T::of(0.5) {
        return (-ln_gamma(x)).exp();
    }
    // 1/Γ(x) = sin(πx) Γ(1 − x) / π; 1 − x > 0.5 here
    let pix = T::PI() * x;
    pix.sin() * gamma(T::one() - x) / T::PI()
}
