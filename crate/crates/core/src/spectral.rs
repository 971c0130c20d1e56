//! Diagonal representation of the spatial operator.
//!
//! The solvers only ever see the operator through its spectrum
//! 0 < λ_1 ≤ λ_2 ≤ … ≤ λ_N and act mode by mode. Two realizations exist:
//! a purely abstract one where the caller supplies the eigenvalues, and the
//! 1-D Dirichlet Laplacian on (0, π), whose eigenpairs λ_k = k²,
//! v_k(x) = √(2/π) sin(kx) make analysis/synthesis between grid functions
//! and coefficient vectors concrete.

use crate::error::{Error, Result};
use crate::quad::composite_simpson;
use crate::scalar::{KahanSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Caller-supplied spectrum; no eigenfunctions available.
    AbstractDiagonal,
    /// −d²/dx² on (0, π) with zero boundary values: λ_k = k².
    DirichletLaplacian1D,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator<T> {
    eigenvalues: Vec<T>,
    basis: BasisKind,
}

impl<T: Real> DiagonalOperator<T> {
    /// The first `n_modes` Dirichlet eigenvalues k², k = 1..=n.
    pub fn dirichlet_laplacian_1d(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParams("operator needs at least one mode".into()));
        }
        let eigenvalues = (1..=n_modes).map(|k| T::of_usize(k * k)).collect();
        Ok(Self { eigenvalues, basis: BasisKind::DirichletLaplacian1D })
    }

    /// Abstract operator from an explicit ascending positive spectrum.
    pub fn diagonal(eigenvalues: Vec<T>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParams("operator needs at least one mode".into()));
        }
        for &l in &eigenvalues {
            if !(l.is_finite() && l > T::zero()) {
                return Err(Error::InvalidParams(format!("eigenvalues must be positive and finite, got {l}")));
            }
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParams("eigenvalues must be ascending".into()));
        }
        Ok(Self { eigenvalues, basis: BasisKind::AbstractDiagonal })
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }
}

/// Coefficient vector in the operator's eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector<T> {
    coeffs: Vec<T>,
}

impl<T: Real> SpectralVector<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("coefficient vector must be nonempty".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![T::zero(); n] }
    }

    /// Unit vector in mode `k` (1-based, matching the eigenvalue numbering).
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!("mode index {k} outside 1..={n}")));
        }
        let mut coeffs = vec![T::zero(); n];
        coeffs[k - 1] = T::one();
        Ok(Self { coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect(),
        })
    }
}

/// ‖A^ε g‖ = (Σ_k λ_k^{2ε} g_k²)^{1/2}. ε = 0 is the plain ℓ² norm, ε = 1
/// the graph norm of the operator.
pub fn fractional_norm<T: Real>(
    op: &DiagonalOperator<T>,
    g: &SpectralVector<T>,
    eps: T,
) -> Result<T> {
    if op.n_modes() != g.len() {
        return Err(Error::LengthMismatch { expected: op.n_modes(), got: g.len() });
    }
    if !eps.is_finite() {
        return Err(Error::InvalidParams(format!("norm exponent must be finite, got {eps}")));
    }
    let two = T::of(2.0);
    let mut acc = KahanSum::new();
    for (&l, &c) in op.eigenvalues().iter().zip(g.coeffs()) {
        let w = if eps == T::zero() { T::one() } else { l.powf(two * eps) };
        acc.add(w * c * c);
    }
    Ok(acc.value().sqrt())
}

/// Uniform grid of `n_points` on [0, π], endpoints included.
pub fn uniform_grid<T: Real>(n_points: usize) -> Result<Vec<T>> {
    if n_points < 3 {
        return Err(Error::GridTooCoarse { needed: 3, got: n_points, constraint: "uniform grid" });
    }
    let h = T::PI() / T::of_usize(n_points - 1);
    Ok((0..n_points).map(|i| T::of_usize(i) * h).collect())
}

/// Fourier-sine analysis: coefficients g_k = ∫₀^π g(x) √(2/π) sin(kx) dx of
/// samples on the uniform [0, π] grid, by composite Simpson.
///
/// Needs an odd sample count of at least 4N + 1: the trapezoid sums inside
/// Simpson are then exact for every product sin(jx) sin(kx) with
/// j + k ≤ 2N, so band-limited data is analyzed to machine precision.
pub fn project<T: Real>(op: &DiagonalOperator<T>, samples: &[T]) -> Result<SpectralVector<T>> {
    if op.basis() != BasisKind::DirichletLaplacian1D {
        return Err(Error::UnsupportedBasis("projection needs the Dirichlet sine basis"));
    }
    let n = op.n_modes();
    let needed = 4 * n + 1;
    if samples.len() < needed {
        return Err(Error::GridTooCoarse {
            needed,
            got: samples.len(),
            constraint: "4 modes-worth of points per mode plus one",
        });
    }
    if samples.len() % 2 == 0 {
        return Err(Error::GridTooCoarse {
            needed: samples.len() + 1,
            got: samples.len(),
            constraint: "composite Simpson needs an odd point count",
        });
    }
    let grid = uniform_grid::<T>(samples.len())?;
    let norm = (T::of(2.0) / T::PI()).sqrt();
    let mut coeffs = Vec::with_capacity(n);
    let mut weighted = vec![T::zero(); samples.len()];
    for k in 1..=n {
        let kf = T::of_usize(k);
        for (w, (&x, &s)) in weighted.iter_mut().zip(grid.iter().zip(samples)) {
            *w = s * norm * (kf * x).sin();
        }
        coeffs.push(composite_simpson(&weighted, T::zero(), T::PI())?);
    }
    SpectralVector::new(coeffs)
}

/// Fourier-sine synthesis: Σ_k g_k √(2/π) sin(kx) on an arbitrary grid.
pub fn synthesize<T: Real>(
    op: &DiagonalOperator<T>,
    g: &SpectralVector<T>,
    grid: &[T],
) -> Result<Vec<T>> {
    if op.basis() != BasisKind::DirichletLaplacian1D {
        return Err(Error::UnsupportedBasis("synthesis needs the Dirichlet sine basis"));
    }
    if op.n_modes() != g.len() {
        return Err(Error::LengthMismatch { expected: op.n_modes(), got: g.len() });
    }
    let norm = (T::of(2.0) / T::PI()).sqrt();
    let values = grid
        .iter()
        .map(|&x| {
            let mut acc = KahanSum::new();
            for (k, &c) in g.coeffs().iter().enumerate() {
                let kf = T::of_usize(k + 1);
                acc.add(c * norm * (kf * x).sin());
            }
            acc.value()
        })
        .collect();
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dirichlet_eigenvalues_are_exact_squares() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(6).unwrap();
        assert_eq!(op.eigenvalues(), &[1.0, 4.0, 9.0, 16.0, 25.0, 36.0]);
        assert_eq!(op.basis(), BasisKind::DirichletLaplacian1D);
    }

    #[test]
    fn diagonal_constructor_validates_spectrum() {
        assert!(DiagonalOperator::diagonal(vec![1.0, 2.0, 2.0, 5.0]).is_ok());
        assert!(DiagonalOperator::diagonal(vec![0.0, 1.0]).is_err());
        assert!(DiagonalOperator::diagonal(vec![2.0, 1.0]).is_err());
        assert!(DiagonalOperator::<f64>::diagonal(vec![]).is_err());
        assert!(DiagonalOperator::diagonal(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn fractional_norm_reference_points() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(4).unwrap();
        let e1 = SpectralVector::unit(4, 1).unwrap();
        assert_relative_eq!(fractional_norm(&op, &e1, 0.0).unwrap(), 1.0);
        let e2 = SpectralVector::unit(4, 2).unwrap();
        assert_relative_eq!(fractional_norm(&op, &e2, 1.0).unwrap(), 4.0, max_relative = 1e-15);

        let op = DiagonalOperator::diagonal(vec![1.0, 4.0]).unwrap();
        let g = SpectralVector::new(vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(
            fractional_norm(&op, &g, 0.5).unwrap(),
            5.0f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn fractional_norm_is_monotone_in_the_exponent() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(8).unwrap();
        let g = SpectralVector::new(vec![0.3, -0.1, 0.7, 0.0, 0.2, -0.5, 0.05, 1.0]).unwrap();
        let mut prev = fractional_norm(&op, &g, 0.0).unwrap();
        for i in 1..=10 {
            let eps = i as f64 * 0.1;
            let n = fractional_norm(&op, &g, eps).unwrap();
            assert!(n >= prev, "norm decreased at eps={eps}");
            prev = n;
        }
    }

    #[test]
    fn project_recovers_pure_modes_exactly() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(5).unwrap();
        let grid = uniform_grid::<f64>(4 * 5 + 1).unwrap();
        let norm = (2.0 / std::f64::consts::PI).sqrt();
        let samples: Vec<f64> = grid.iter().map(|&x| norm * x.sin()).collect();
        let g = project(&op, &samples).unwrap();
        assert_relative_eq!(g.coeffs()[0], 1.0, max_relative = 1e-13);
        for &c in &g.coeffs()[1..] {
            assert!(c.abs() < 1e-13, "spurious coefficient {c}");
        }

        let samples: Vec<f64> =
            grid.iter().map(|&x| norm * (x.sin() + 0.5 * (3.0 * x).sin())).collect();
        let g = project(&op, &samples).unwrap();
        let expect = [1.0, 0.0, 0.5, 0.0, 0.0];
        for (got, want) in g.coeffs().iter().zip(expect) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn project_matches_closed_form_for_parabola_data() {
        // x(π−x) has sine coefficients √(2/π)·4/k³ for odd k, 0 for even;
        // not band-limited, so accuracy comes from the Simpson order on a
        // fine grid rather than from exact orthogonality
        let n = 8;
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(n).unwrap();
        let grid = uniform_grid::<f64>(2049).unwrap();
        let pi = std::f64::consts::PI;
        let samples: Vec<f64> = grid.iter().map(|&x| x * (pi - x)).collect();
        let g = project(&op, &samples).unwrap();
        let norm = (2.0 / pi).sqrt();
        for (i, &c) in g.coeffs().iter().enumerate() {
            let k = i + 1;
            let want = if k % 2 == 1 { norm * 4.0 / (k * k * k) as f64 } else { 0.0 };
            assert!((c - want).abs() < 1e-8, "mode {k}: {c} vs {want}");
        }
    }

    #[test]
    fn synthesize_reference_points() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(3).unwrap();
        let grid = uniform_grid::<f64>(17).unwrap();
        let z = synthesize(&op, &SpectralVector::zeros(3), &grid).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        let e1 = SpectralVector::unit(3, 1).unwrap();
        let v = synthesize(&op, &e1, &grid).unwrap();
        let norm = (2.0 / std::f64::consts::PI).sqrt();
        for (&x, &val) in grid.iter().zip(&v) {
            assert_relative_eq!(val, norm * x.sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn project_is_a_left_inverse_of_synthesize() {
        let n = 32;
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(n).unwrap();
        // deterministic, aperiodic coefficients
        let g = SpectralVector::new(
            (1..=n).map(|k| ((k * k) as f64 * 0.7).sin() / k as f64).collect(),
        )
        .unwrap();
        let grid = uniform_grid::<f64>(4 * n + 1).unwrap();
        let samples = synthesize(&op, &g, &grid).unwrap();
        let back = project(&op, &samples).unwrap();
        for (a, b) in g.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn parseval_holds_on_the_grid() {
        let n = 16;
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(n).unwrap();
        let g = SpectralVector::new((1..=n).map(|k| 1.0 / (k as f64).sqrt()).collect()).unwrap();
        let grid = uniform_grid::<f64>(4 * n + 1).unwrap();
        let u = synthesize(&op, &g, &grid).unwrap();
        let squared: Vec<f64> = u.iter().map(|&v| v * v).collect();
        let l2 = composite_simpson(&squared, 0.0, std::f64::consts::PI).unwrap().sqrt();
        let coeff_norm = fractional_norm(&op, &g, 0.0).unwrap();
        assert_relative_eq!(l2, coeff_norm, max_relative = 1e-8);
    }

    #[test]
    fn project_rejects_coarse_even_or_wrong_basis_input() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(8).unwrap();
        let short = vec![0.0; 16];
        assert!(matches!(project(&op, &short), Err(Error::GridTooCoarse { .. })));
        let even = vec![0.0; 34];
        assert!(matches!(project(&op, &even), Err(Error::GridTooCoarse { .. })));
        let diag = DiagonalOperator::diagonal(vec![1.0, 2.0]).unwrap();
        assert!(matches!(project(&diag, &vec![0.0; 33]), Err(Error::UnsupportedBasis(_))));
        let g = SpectralVector::zeros(2);
        assert!(matches!(synthesize(&diag, &g, &[0.0]), Err(Error::UnsupportedBasis(_))));
    }

    #[test]
    fn vector_helpers_validate() {
        assert!(SpectralVector::new(vec![f64::NAN]).is_err());
        assert!(SpectralVector::<f64>::unit(4, 0).is_err());
        assert!(SpectralVector::<f64>::unit(4, 5).is_err());
        let a = SpectralVector::new(vec![3.0, 1.0]).unwrap();
        let b = SpectralVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(a.minus(&b).unwrap().coeffs(), &[2.0, 0.0]);
        assert!(a.minus(&SpectralVector::zeros(3)).is_err());
        assert_eq!(a.scaled(2.0).coeffs(), &[6.0, 2.0]);
    }
}
