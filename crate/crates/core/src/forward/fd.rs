//! Crank–Nicolson finite differences for `u_t = u_xx - P u`, used as an
//! independent check of the expansion solver.

use nalgebra::{Matrix2, Vector2};

use super::{BoundaryTrace, TimeGrid};
use crate::error::{Error, Result};
use crate::field::{Grid1D, VectorValuedField};
use crate::potential::MatrixPotential;

/// Resolution of the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Number of spatial intervals on `[0, 1]`.
    pub intervals: usize,
    /// Largest time step; steps are shortened to land on every output time.
    pub max_dt: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            intervals: 400,
            max_dt: 5e-4,
        }
    }
}

/// Boundary traces of the finite-difference solution.
///
/// Second-order centred differences in space with ghost-node Neumann
/// closure, trapezoidal rule in time after four implicit Euler half-steps,
/// one block-tridiagonal solve per step.
pub fn fd_oracle_solve(
    potential: &MatrixPotential,
    a: &VectorValuedField,
    times: &TimeGrid,
    opts: FdOptions,
) -> Result<BoundaryTrace> {
    if opts.intervals < 4 || !(opts.max_dt > 0.0) {
        return Err(Error::Configuration(format!(
            "finite-difference oracle needs at least 4 intervals and a positive step, got {} and {}",
            opts.intervals, opts.max_dt
        )));
    }
    let grid = Grid1D::new(0.0, 1.0, opts.intervals + 1)?;
    let p = potential.sample(&grid)?;
    let mut u = a.resample(&grid)?.values;
    let h = grid.spacing();
    let m = opts.intervals;

    let mut left = Vec::with_capacity(times.len());
    let mut right = Vec::with_capacity(times.len());
    let mut now = 0.0;
    let mut stepper: Option<(f64, Stepper)> = None;
    for (k, &target) in times.times().iter().enumerate() {
        let span = target - now;
        let mut steps = (span / opts.max_dt).ceil().max(if k == 0 { 2.0 } else { 1.0 }) as usize;
        let dt = span / steps as f64;
        if k == 0 {
            // Rannacher start: four implicit Euler half-steps damp the
            // non-smooth modes that Crank-Nicolson would carry undamped.
            let euler = Stepper::new(&p, h, 0.5 * dt, 1.0)?;
            for _ in 0..4 {
                u = euler.step(&u);
            }
            steps -= 2;
        }
        let reuse = matches!(&stepper, Some((d, _)) if (d - dt).abs() <= 1e-15 * dt);
        if !reuse {
            stepper = Some((dt, Stepper::new(&p, h, dt, 0.5)?));
        }
        let (_, s) = stepper.as_ref().expect("stepper built above");
        for _ in 0..steps {
            u = s.step(&u);
        }
        now = target;
        left.push(u[0]);
        right.push(u[m]);
    }
    BoundaryTrace::new(times.times().to_vec(), left, right)
}

// Theta scheme: factorized (I - θ dt L) with the explicit part (I + (1 - θ) dt L).
struct Stepper {
    p: Vec<Matrix2<f64>>,
    // Explicit weights (1 - θ) r and (1 - θ) dt.
    r: f64,
    explicit_dt: f64,
    // Forward-elimination data of the block Thomas algorithm.
    inv_pivot: Vec<Matrix2<f64>>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl Stepper {
    fn new(p: &[Matrix2<f64>], h: f64, dt: f64, theta: f64) -> Result<Self> {
        let m = p.len() - 1;
        let r = dt / (h * h);
        // Off-diagonal couplings of the implicit matrix (scalar multiples of I).
        let mut lower = vec![-theta * r; m + 1];
        let mut upper = vec![-theta * r; m + 1];
        upper[0] = -2.0 * theta * r;
        lower[m] = -2.0 * theta * r;
        lower[0] = 0.0;
        upper[m] = 0.0;
        let mut inv_pivot = Vec::with_capacity(m + 1);
        let mut prev_upper = 0.0;
        let mut prev_inv = Matrix2::zeros();
        for i in 0..=m {
            let diag = Matrix2::identity() * (1.0 + 2.0 * theta * r) + p[i] * (theta * dt);
            let pivot = if i == 0 {
                diag
            } else {
                diag - prev_inv * (lower[i] * prev_upper)
            };
            let inv = pivot.try_inverse().ok_or_else(|| {
                Error::Configuration(format!("singular block at node {i} in the implicit solve"))
            })?;
            if !inv.iter().all(|v| v.is_finite()) {
                return Err(Error::Configuration(format!(
                    "ill-conditioned block at node {i} in the implicit solve"
                )));
            }
            inv_pivot.push(inv);
            prev_inv = inv;
            prev_upper = upper[i];
        }
        Ok(Self {
            p: p.to_vec(),
            r: (1.0 - theta) * r,
            explicit_dt: (1.0 - theta) * dt,
            inv_pivot,
            upper,
            lower,
        })
    }

    fn step(&self, u: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
        let m = u.len() - 1;
        let mut rhs = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let l = if i == 0 { u[1] } else { u[i - 1] };
            let rgt = if i == m { u[m - 1] } else { u[i + 1] };
            let lap = (l + rgt - u[i] * 2.0) * self.r;
            rhs.push(u[i] + lap - self.p[i] * u[i] * self.explicit_dt);
        }
        // Forward sweep: y_i = inv_i (rhs_i - lower_i y_{i-1}).
        let mut y = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let b = if i == 0 { rhs[0] } else { rhs[i] - y[i - 1] * self.lower[i] };
            y.push(self.inv_pivot[i] * b);
        }
        // Back substitution: x_i = y_i - inv_i upper_i x_{i+1}.
        let mut x = y;
        for i in (0..m).rev() {
            let next = x[i + 1];
            x[i] -= self.inv_pivot[i] * next * self.upper[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_diagonal_exact_decay() {
        let p = MatrixPotential::diagonal(1.0, 2.0);
        let a = VectorValuedField::from_fn(Grid1D::unit_default(), |_| Vector2::new(1.0, 1.0));
        let times = TimeGrid::linear(0.1, 1.0, 10).unwrap();
        let tr = fd_oracle_solve(&p, &a, &times, FdOptions::default()).unwrap();
        for (k, &t) in tr.times.iter().enumerate() {
            let want = Vector2::new((-t).exp(), (-2.0 * t).exp());
            assert!((tr.left[k] - want).amax() < 1e-6);
            assert!((tr.right[k] - want).amax() < 1e-6);
        }
    }

    #[test]
    fn separable_cosines() {
        let p = MatrixPotential::zero();
        let a = VectorValuedField::from_fn(Grid1D::unit_default(), |x| {
            Vector2::new((PI * x).cos(), (2.0 * PI * x).cos())
        });
        let times = TimeGrid::linear(0.1, 1.0, 10).unwrap();
        let tr = fd_oracle_solve(&p, &a, &times, FdOptions::default()).unwrap();
        for (k, &t) in tr.times.iter().enumerate() {
            let e1 = (-PI * PI * t).exp();
            let e2 = (-4.0 * PI * PI * t).exp();
            assert!((tr.left[k] - Vector2::new(e1, e2)).amax() < 1e-5);
            assert!((tr.right[k] - Vector2::new(-e1, e2)).amax() < 1e-5);
        }
    }

    #[test]
    fn incompatible_initial_value() {
        // a(x) = x has a'(1) != 0; u = 1/2 - Σ_{k odd} 4/(kπ)² cos(kπx) e^{-(kπ)² t}.
        let exact = |x: f64, t: f64| {
            0.5 - (1..400)
                .step_by(2)
                .map(|k| {
                    let w = k as f64 * PI;
                    4.0 / (w * w) * (w * x).cos() * (-w * w * t).exp()
                })
                .sum::<f64>()
        };
        let a = VectorValuedField::from_fn(Grid1D::unit_default(), |x| Vector2::new(x, 0.0));
        let times = TimeGrid::linear(0.05, 1.0, 20).unwrap();
        let tr = fd_oracle_solve(&MatrixPotential::zero(), &a, &times, FdOptions::default()).unwrap();
        for (k, &t) in tr.times.iter().enumerate() {
            assert!((tr.left[k][0] - exact(0.0, t)).abs() < 1e-5, "t = {t}");
            assert!((tr.right[k][0] - exact(1.0, t)).abs() < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn bad_options_are_configuration_errors() {
        let a = VectorValuedField::zeros(Grid1D::unit_default());
        let times = TimeGrid::linear(0.1, 1.0, 3).unwrap();
        let opts = FdOptions {
            intervals: 2,
            max_dt: 1e-3,
        };
        assert!(matches!(
            fd_oracle_solve(&MatrixPotential::zero(), &a, &times, opts),
            Err(Error::Configuration(_))
        ));
    }
}
