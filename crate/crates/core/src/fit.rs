//! Linear least-squares slope fits for convergence-order and growth-rate
//! reports.

use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Real};

/// Slope of the least-squares line through (xs[i], ys[i]).
pub fn slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParams("slope fit needs at least two points".into()));
    }
    if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("slope fit needs finite data".into()));
    }
    let n = T::of_usize(xs.len());
    let mean = |vs: &[T]| {
        let mut s = KahanSum::new();
        for &v in vs {
            s.add(v);
        }
        s.value() / n
    };
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = KahanSum::new();
    let mut sxx = KahanSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy.add((x - mx) * (y - my));
        sxx.add((x - mx) * (x - mx));
    }
    if sxx.value() == T::zero() {
        return Err(Error::InvalidParams("slope fit needs at least two distinct x".into()));
    }
    Ok(sxy.value() / sxx.value())
}

/// Slope of ln(y) against ln(x); the exponent of an empirical power law.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.iter().chain(ys.iter()).any(|v| !(*v > T::zero())) {
        return Err(Error::InvalidParams("log-log fit needs strictly positive data".into()));
    }
    let lx: Vec<T> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|v| v.ln()).collect();
    slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_linear_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 - 2.5 * x).collect();
        assert_relative_eq!(slope(&xs, &ys).unwrap(), -2.5, epsilon = 1e-14);
    }

    #[test]
    fn recovers_power_law_exponent() {
        let xs: Vec<f64> = (1..=6).map(|i| 10f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.7)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys).unwrap(), -1.7, epsilon = 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(slope(&[1.0], &[2.0]).is_err());
        assert!(slope(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(slope(&[1.0, 2.0], &[2.0]).is_err());
        assert!(loglog_slope(&[1.0, -2.0], &[2.0, 3.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 3.0]).is_err());
    }
}
