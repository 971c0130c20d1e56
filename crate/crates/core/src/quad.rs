//! Quadrature primitives: Gauss-Legendre rules and panel composition.
//!
//! Nodes and weights are generated by Newton iteration on the Legendre
//! recurrence (no tables), so any node count in the supported range works
//! and the rules are available for every scalar type.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gauss-Legendre rule on (-1, 1).
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the n-point rule. Supported n: 2 ..= 64.
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=64).contains(&n) {
            return Err(Error::InvalidParams(format!(
                "Gauss-Legendre node count must be in 2..=64, got {n}"
            )));
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::of_usize(n);
        for i in 0..(n + 1) / 2 {
            // Chebyshev-based initial guess, then Newton on P_n
            let theta = T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5));
            let mut x = theta.cos();
            let mut dp = T::zero();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= T::epsilon() * T::of(4.0) {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Ok(Self { nodes, weights })
    }

    /// Integrates f over [a, b] with a single panel.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = T::of(0.5);
        let mid = half * (a + b);
        let rad = half * (b - a);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + rad * x);
        }
        acc * rad
    }

    /// Integrates f over [0, upper] with `panels` subintervals graded
    /// geometrically (ratio 2) toward 0. The innermost panel reaches 0, so
    /// integrands with mild endpoint singularities in their derivatives are
    /// resolved without a global mesh refinement.
    pub fn integrate_graded<F: FnMut(T) -> T>(&self, upper: T, panels: usize, mut f: F) -> T {
        debug_assert!(upper > T::zero());
        debug_assert!(panels >= 1);
        let half = T::of(0.5);
        let mut acc = crate::scalar::KahanSum::new();
        let mut hi = upper;
        for _ in 0..panels - 1 {
            let lo = hi * half;
            acc.add(self.integrate(lo, hi, &mut f));
            hi = lo;
        }
        acc.add(self.integrate(T::zero(), hi, &mut f));
        acc.value()
    }
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = T::of_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Composite Simpson weights applied to equally spaced samples over [a, b].
/// The sample count must be odd (an even number of intervals).
pub fn composite_simpson<T: Real>(samples: &[T], a: T, b: T) -> Result<T> {
    let n = samples.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::GridTooCoarse {
            needed: 3,
            got: n,
            constraint: "odd sample count (even interval count) for Simpson",
        });
    }
    let h = (b - a) / T::of_usize(n - 1);
    let mut acc = crate::scalar::KahanSum::new();
    acc.add(samples[0]);
    acc.add(samples[n - 1]);
    for (i, &s) in samples.iter().enumerate().skip(1).take(n - 2) {
        let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        acc.add(w * s);
    }
    Ok(acc.value() * h / T::of(3.0))
}
