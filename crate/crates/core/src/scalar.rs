//! Scalar abstraction for the numeric core.
//!
//! Everything downstream is generic over [`Real`], a floating-point scalar
//! with the usual transcendental functions. `f32` and `f64` both satisfy the
//! bound through the blanket impl; the crate root exports `f64` aliases for
//! the common types. The stated tolerances of the solvers assume `f64`.

use core::fmt::{Debug, Display};
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant into the scalar type.
    ///
    /// Panics only if the type cannot represent ordinary finite constants,
    /// which none of the supported scalars do.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must be representable")
    }

    /// Converts a count or index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must be representable")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
}

/// Compensated (Kahan) accumulator. Keeps the running error of the sum near
/// one ulp of the result even when intermediate terms are much larger than
/// the final value.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms_next_to_large_ones() {
        let mut k = KahanSum::<f64>::new();
        let mut naive = 0.0f64;
        // 1e8 copies of 1e-8 interleaved with +/- 1e8 should sum to ~1.
        k.add(1e8);
        naive += 1e8;
        for _ in 0..10_000 {
            k.add(1e-4);
            naive += 1e-4;
        }
        k.add(-1e8);
        naive += -1e8;
        let exact = 1.0;
        assert!((k.value() - exact).abs() < 1e-12, "kahan {}", k.value());
        // the naive sum is visibly worse; this guards against the
        // compensation being optimized away
        assert!((naive - exact).abs() >= (k.value() - exact).abs());
    }

    #[test]
    fn scalar_conversions() {
        assert_eq!(f64::of(1.5), 1.5);
        assert_eq!(f32::of(1.5), 1.5f32);
        assert_eq!(f64::of_usize(7), 7.0);
    }
}
