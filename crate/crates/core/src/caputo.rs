//! Independent discrete check of computed solutions: the L1 finite-difference
//! Caputo derivative, and the equation residual it induces.
//!
//! The solver itself never discretizes the derivative, so feeding its output
//! through this module closes the loop: if Σ_j q_j ∂^{ρ_j} u + A u − f is
//! small at the L1 order, solver and equation agree by two unrelated routes.

use crate::error::{Error, Result};
use crate::forward::{SourceTerm, TrajectoryResult};
use crate::gamma::gamma;
use crate::mlf::FractionalOrders;
use crate::scalar::{KahanSum, Real};
use crate::spectral::DiagonalOperator;

/// Uniform nodes t_0 < t_1 < … covering [start, end].
#[derive(Clone, Copy, Debug)]
pub struct TimeGrid<T> {
    start: T,
    step: T,
    n_nodes: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn uniform(start: T, end: T, n_nodes: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start >= T::zero() && end > start) {
            return Err(Error::InvalidParams(format!(
                "grid needs 0 <= start < end, got [{start}, {end}]"
            )));
        }
        if n_nodes < 3 {
            return Err(Error::GridTooCoarse { needed: 3, got: n_nodes, constraint: "at least two steps" });
        }
        let step = (end - start) / T::of_usize(n_nodes - 1);
        Ok(Self { start, step, n_nodes })
    }

    /// Wrap explicit nodes, checking uniformity to round-off.
    pub fn from_nodes(nodes: &[T]) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::GridTooCoarse { needed: 3, got: nodes.len(), constraint: "at least two steps" });
        }
        let step = nodes[1] - nodes[0];
        if !(step > T::zero()) {
            return Err(Error::GridMismatch("nodes must be strictly increasing".into()));
        }
        let tol = step * T::of(1e-9);
        for w in nodes.windows(2) {
            if ((w[1] - w[0]) - step).abs() > tol {
                return Err(Error::GridMismatch(format!(
                    "nonuniform spacing: {} vs step {step}",
                    w[1] - w[0]
                )));
            }
        }
        Ok(Self { start: nodes[0], step, n_nodes: nodes.len() })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.start + self.step * T::of_usize(self.n_nodes - 1)
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_nodes).map(|i| self.start + self.step * T::of_usize(i)).collect()
    }
}

/// L1 approximation of the Caputo derivative of order `rho`, based at the
/// grid origin, returned at the nodes t_1 … t_{n}:
///
/// ```text
/// (∂^ρ h)(t_m) ≈ h_step^{−ρ}/Γ(2−ρ) · Σ_{i=0}^{m−1} b_i (h_{m−i} − h_{m−i−1}),
/// b_i = (i+1)^{1−ρ} − i^{1−ρ}
/// ```
///
/// Exact for piecewise-linear samples; order 2−ρ for C² functions.
pub fn caputo_l1<T: Real>(grid: &TimeGrid<T>, samples: &[T], rho: T) -> Result<Vec<T>> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::InvalidOrder(format!(
            "L1 scheme needs an order in (0, 1), got {rho}"
        )));
    }
    if samples.len() != grid.n_nodes() {
        return Err(Error::LengthMismatch { expected: grid.n_nodes(), got: samples.len() });
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParams("samples must be finite".into()));
    }
    let n = samples.len() - 1;
    let one_m_rho = T::one() - rho;
    let weights: Vec<T> = (0..n)
        .map(|i| {
            let ip = T::of_usize(i + 1).powf(one_m_rho);
            let il = T::of_usize(i).powf(one_m_rho);
            ip - il
        })
        .collect();
    let scale = grid.step().powf(-rho) / gamma(T::of(2.0) - rho);
    let deltas: Vec<T> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = KahanSum::new();
        for i in 0..m {
            acc.add(weights[i] * deltas[m - 1 - i]);
        }
        out.push(scale * acc.value());
    }
    Ok(out)
}

/// Residuals r_k(t_m) = Σ_j q_j (∂^{ρ_j} u_k)(t_m) + λ_k u_k(t_m) − f_k(t_m)
/// at the interior grid nodes.
#[derive(Clone, Debug)]
pub struct ResidualReport<T> {
    /// Interior nodes t_1 … t_n.
    pub times: Vec<T>,
    /// residuals[m][k]: node-major, mode-minor.
    pub residuals: Vec<Vec<T>>,
    pub max_abs: T,
}

impl<T: Real> ResidualReport<T> {
    /// max |r_k(t_m)| over nodes with t_m >= t_min; the early window is
    /// excluded by callers because the solution's graph norm blows up at 0.
    pub fn max_abs_from(&self, t_min: T) -> T {
        let mut sup = T::zero();
        for (m, &t) in self.times.iter().enumerate() {
            if t < t_min {
                continue;
            }
            for &r in &self.residuals[m] {
                sup = sup.max(r.abs());
            }
        }
        sup
    }
}

/// Apply the discrete operator to a trajectory sampled on a uniform grid
/// that starts at t = 0 (the derivative's base point; without the full
/// history the residual would not vanish). A unit order contributes a
/// backward difference instead of L1.
pub fn residual<T: Real>(
    op: &DiagonalOperator<T>,
    orders: &FractionalOrders<T>,
    traj: &TrajectoryResult<T>,
    f: &SourceTerm<T>,
) -> Result<ResidualReport<T>> {
    let grid = TimeGrid::from_nodes(&traj.times)?;
    if grid.start() != T::zero() {
        return Err(Error::GridMismatch(format!(
            "residual grid must start at t = 0 to carry the full memory, got {}",
            grid.start()
        )));
    }
    if traj.states.len() != grid.n_nodes() {
        return Err(Error::LengthMismatch { expected: grid.n_nodes(), got: traj.states.len() });
    }
    let n_modes = op.n_modes();
    if traj.states.iter().any(|s| s.len() != n_modes) {
        return Err(Error::GridMismatch("trajectory mode count differs from operator".into()));
    }
    if let Some(m) = f.n_modes() {
        if m != n_modes {
            return Err(Error::LengthMismatch { expected: n_modes, got: m });
        }
    }
    let n_interior = grid.n_nodes() - 1;
    let times: Vec<T> = grid.nodes()[1..].to_vec();
    let mut residuals = vec![vec![T::zero(); n_modes]; n_interior];
    for (k, &lam) in op.eigenvalues().iter().enumerate() {
        let samples: Vec<T> = traj.states.iter().map(|s| s.coeffs()[k]).collect();
        let mut deriv = vec![T::zero(); n_interior];
        for (&rho, &q) in orders.rhos().iter().zip(orders.weights()) {
            if rho == T::one() {
                for m in 1..=n_interior {
                    deriv[m - 1] += q * (samples[m] - samples[m - 1]) / grid.step();
                }
            } else {
                let l1 = caputo_l1(&grid, &samples, rho)?;
                for m in 0..n_interior {
                    deriv[m] += q * l1[m];
                }
            }
        }
        for m in 0..n_interior {
            residuals[m][k] = deriv[m] + lam * samples[m + 1] - f.eval_mode(k, times[m]);
        }
    }
    let mut max_abs = T::zero();
    for row in &residuals {
        for &r in row {
            max_abs = max_abs.max(r.abs());
        }
    }
    Ok(ResidualReport { times, residuals, max_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::forward::forward_solve;
    use crate::spectral::{fractional_norm, SpectralVector};

    #[test]
    fn grid_constructors_validate_and_report_shape() {
        let g = TimeGrid::uniform(0.0, 1.0, 11).unwrap();
        assert_eq!(g.n_nodes(), 11);
        assert_relative_eq!(g.step(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(g.end(), 1.0, epsilon = 1e-15);
        assert_eq!(g.nodes().len(), 11);
        assert!(TimeGrid::uniform(0.0, 1.0, 2).is_err());
        assert!(TimeGrid::uniform(1.0, 0.5, 5).is_err());
        assert!(TimeGrid::from_nodes(&[0.0, 0.1, 0.3]).is_err());
        assert!(TimeGrid::from_nodes(&[0.0, 0.1, 0.2, 0.3]).is_ok());
    }

    #[test]
    fn l1_annihilates_constants_exactly() {
        let g = TimeGrid::uniform(0.0, 2.0, 21).unwrap();
        let samples = vec![3.7; 21];
        for r in caputo_l1(&g, &samples, 0.6).unwrap() {
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn l1_is_exact_on_linear_functions() {
        // piecewise-linear interpolation reproduces h(t) = t, so the only
        // error is round-off
        let g = TimeGrid::uniform(0.0, 1.5, 31).unwrap();
        let samples: Vec<f64> = g.nodes();
        for rho in [0.3, 0.5, 0.9] {
            let got = caputo_l1(&g, &samples, rho).unwrap();
            for (m, &t) in g.nodes()[1..].iter().enumerate() {
                let want = t.powf(1.0 - rho) / gamma(2.0 - rho);
                assert_relative_eq!(got[m], want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn l1_converges_at_order_two_minus_rho_on_quadratics() {
        let rho = 0.6;
        let err_at = |n: usize| -> f64 {
            let g = TimeGrid::uniform(0.0, 1.0, n + 1).unwrap();
            let samples: Vec<f64> = g.nodes().iter().map(|t| t * t).collect();
            let got = caputo_l1(&g, &samples, rho).unwrap();
            let m = n - 1;
            let t: f64 = g.nodes()[n];
            let want = 2.0 * t.powf(2.0 - rho) / gamma(3.0 - rho);
            (got[m] - want).abs()
        };
        let e1 = err_at(64);
        let e2 = err_at(128);
        let order = (e1 / e2).log2();
        assert!(order >= 2.0 - rho - 0.1, "observed order {order}");
    }

    #[test]
    fn l1_is_linear_in_the_samples() {
        let g: TimeGrid<f64> = TimeGrid::uniform(0.0, 1.0, 17).unwrap();
        let a: Vec<f64> = g.nodes().iter().map(|t| (2.0 * t).sin()).collect();
        let b: Vec<f64> = g.nodes().iter().map(|t| t * t - 0.3).collect();
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let da = caputo_l1(&g, &a, 0.45).unwrap();
        let db = caputo_l1(&g, &b, 0.45).unwrap();
        let dc = caputo_l1(&g, &combo, 0.45).unwrap();
        for m in 0..dc.len() {
            assert_relative_eq!(dc[m], 2.0 * da[m] - 0.5 * db[m], epsilon = 1e-11);
        }
    }

    #[test]
    fn l1_rejects_bad_orders_and_shapes() {
        let g = TimeGrid::uniform(0.0, 1.0, 5).unwrap();
        let s = vec![0.0; 5];
        assert!(matches!(caputo_l1(&g, &s, 0.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(caputo_l1(&g, &s, 1.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(caputo_l1(&g, &s, 1.3), Err(Error::InvalidOrder(_))));
        assert!(matches!(caputo_l1(&g, &vec![0.0; 4], 0.5), Err(Error::LengthMismatch { .. })));
    }

    fn manual_trajectory(
        op: &DiagonalOperator<f64>,
        times: &[f64],
        state_fn: impl Fn(f64) -> Vec<f64>,
    ) -> TrajectoryResult<f64> {
        let states: Vec<SpectralVector<f64>> =
            times.iter().map(|&t| SpectralVector::new(state_fn(t)).unwrap()).collect();
        let norm0 = states.iter().map(|s| fractional_norm(op, s, 0.0).unwrap()).collect();
        let norm1 = states.iter().map(|s| fractional_norm(op, s, 1.0).unwrap()).collect();
        TrajectoryResult { times: times.to_vec(), states, norm0, norm1 }
    }

    #[test]
    fn zero_trajectory_with_zero_source_has_zero_residual() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(3).unwrap();
        let orders = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let grid = TimeGrid::uniform(0.0, 1.0, 9).unwrap();
        let traj = manual_trajectory(&op, &grid.nodes(), |_| vec![0.0; 3]);
        let rep = residual(&op, &orders, &traj, &SourceTerm::zero()).unwrap();
        assert_eq!(rep.max_abs, 0.0);
    }

    #[test]
    fn solver_output_residual_shrinks_at_the_l1_rate() {
        // M=1, ρ=0.9, φ = e₁: reported max over t >= 0.05 must drop by at
        // least 2x per step halving (order 2−ρ = 1.1)
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(1).unwrap();
        let orders = FractionalOrders::new(vec![0.9], vec![1.0]).unwrap();
        let phi = SpectralVector::unit(1, 1).unwrap();
        let max_at = |n: usize| -> f64 {
            let grid = TimeGrid::uniform(0.0, 1.0, n + 1).unwrap();
            let traj =
                forward_solve(&op, &orders, &phi, &SourceTerm::zero(), &grid.nodes()).unwrap();
            let rep = residual(&op, &orders, &traj, &SourceTerm::zero()).unwrap();
            rep.max_abs_from(0.05)
        };
        let e1 = max_at(160);
        let e2 = max_at(320);
        assert!(e1 / e2 >= 2.0, "ratio {} ({} -> {})", e1 / e2, e1, e2);
    }

    #[test]
    fn unit_order_term_uses_a_backward_difference() {
        // exact semigroup samples: residual of e^{−λt} is O(h)
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(1).unwrap();
        let orders = FractionalOrders::new_relaxed(vec![1.0], vec![1.0]).unwrap();
        let max_at = |n: usize| -> f64 {
            let grid = TimeGrid::uniform(0.0, 1.0, n + 1).unwrap();
            let traj = manual_trajectory(&op, &grid.nodes(), |t| vec![(-t).exp()]);
            residual(&op, &orders, &traj, &SourceTerm::zero()).unwrap().max_abs_from(0.05)
        };
        let e1 = max_at(100);
        let e2 = max_at(200);
        let order = (e1 / e2).log2();
        assert!(order >= 0.8, "observed order {order}");
        assert!(e1 <= 0.01, "residual {e1} too large for an exact solution");
    }

    #[test]
    fn residual_rejects_mismatched_grids_and_shapes() {
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(2).unwrap();
        let orders = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        // grid not starting at zero
        let traj = manual_trajectory(&op, &[0.1, 0.2, 0.3, 0.4], |_| vec![0.0; 2]);
        assert!(matches!(
            residual(&op, &orders, &traj, &SourceTerm::zero()),
            Err(Error::GridMismatch(_))
        ));
        // nonuniform grid
        let traj = manual_trajectory(&op, &[0.0, 0.1, 0.3, 0.4], |_| vec![0.0; 2]);
        assert!(matches!(
            residual(&op, &orders, &traj, &SourceTerm::zero()),
            Err(Error::GridMismatch(_))
        ));
        // wrong mode count
        let op3 = DiagonalOperator::<f64>::dirichlet_laplacian_1d(3).unwrap();
        let traj = manual_trajectory(&op, &[0.0, 0.5, 1.0], |_| vec![0.0; 2]);
        assert!(residual(&op3, &orders, &traj, &SourceTerm::zero()).is_err());
    }

    #[test]
    fn source_terms_enter_the_residual_with_unit_weight() {
        // constant-in-time state u ≡ c solves the equation with f = λc
        // (all fractional derivatives of a constant vanish)
        let op = DiagonalOperator::<f64>::dirichlet_laplacian_1d(1).unwrap();
        let orders = FractionalOrders::new(vec![0.7], vec![1.0]).unwrap();
        let grid = TimeGrid::uniform(0.0, 1.0, 11).unwrap();
        let traj = manual_trajectory(&op, &grid.nodes(), |_| vec![2.0]);
        let f = SourceTerm::separable(
            SpectralVector::new(vec![2.0]).unwrap(),
            crate::forward::TimeFn::Constant(1.0),
            0.5,
        )
        .unwrap();
        let rep = residual(&op, &orders, &traj, &f).unwrap();
        assert!(rep.max_abs <= 1e-14, "{}", rep.max_abs);
    }
}
