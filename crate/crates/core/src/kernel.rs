//! The transformation kernel `K(x, y)` on `D = {0 <= y <= x <= 1}`:
//!
//! `K_xx - K_yy + K P(y) = Q(x) K`, `K(x, x) = ½∫_0^x (Q - P)`, `K_y(x, 0) = 0`,
//!
//! and the map `ψ ↦ Φ = ψ + ∫_0^x K(x, y) ψ(y) dy` from solutions of the
//! P-equation to solutions of the Q-equation.
//!
//! `K` is vectorized row by row, `K_v = (K11, K12, K21, K22)`, so the system
//! reads `(K_v)_xx - (K_v)_yy = r(x, y) K_v` with `r = Q(x) ⊗ I - I ⊗ P(y)`.
//! It is solved as a side-and-normal Goursat problem on
//! `D̃ = {0 < y < 1, y < x < 2 - y}` after extending `Q` to `[0, 2]`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{differentiate, interval_rule_weights, DomainTag, Grid1D, TriangleField, VectorValuedField};
use crate::goursat::{picard_solve, CharFrame, GoursatConfig, GoursatProblem, PicardOptions};
use crate::potential::MatrixPotential;
use crate::spectral::{scan_characteristic, SpectralProblem};

/// Default `m` (lattice spacing `1/m` on `D`).
pub const DEFAULT_KERNEL_RESOLUTION: usize = 400;

/// Row-wise vectorization `(K11, K12, K21, K22)`.
pub fn vectorize(k: &Matrix2<f64>) -> Vector4<f64> {
    Vector4::new(k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)])
}

pub fn unvectorize(v: &Vector4<f64>) -> Matrix2<f64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

/// `r = Q ⊗ I - I ⊗ Pᵀ` for point values `q = Q(x)`, `p = P(y)`.
pub fn r_matrix(p: &Matrix2<f64>, q: &Matrix2<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (c, d) = (col / 2, col % 2);
        let left = if b == d { q[(a, c)] } else { 0.0 };
        let right = if a == c { p[(d, b)] } else { 0.0 };
        left - right
    })
}

/// `Q` continued to `[0, 2]` (formula evaluation for closed forms, reflection
/// for samples).
pub fn extend_potential(q: &MatrixPotential) -> MatrixPotential {
    if q.domain_end() >= 2.0 {
        q.clone()
    } else {
        q.extend()
    }
}

/// `r(x, y)` for `0 <= y <= 1` and `0 <= x <= 2`.
#[derive(Debug, Clone)]
pub struct RField {
    p: MatrixPotential,
    q_ext: MatrixPotential,
}

pub fn assemble_r(p: &MatrixPotential, q: &MatrixPotential) -> RField {
    RField {
        p: p.clone(),
        q_ext: extend_potential(q),
    }
}

impl RField {
    pub fn at(&self, x: f64, y: f64) -> Result<Matrix4<f64>> {
        Ok(r_matrix(&self.p.eval(y)?, &self.q_ext.eval(x)?))
    }
}

/// `K` with its first derivatives on the lattice of `D`.
#[derive(Debug, Clone)]
pub struct KernelField {
    pub p: MatrixPotential,
    pub q: MatrixPotential,
    pub k: TriangleField<Matrix2<f64>>,
    pub kx: TriangleField<Matrix2<f64>>,
    pub ky: TriangleField<Matrix2<f64>>,
    /// Picard sweeps used on `D̃`.
    pub iterations: usize,
    /// Goursat solution on the whole of `D̃` (standard orientation of the
    /// `D̃` frame, see [`d_tilde_frame`]).
    pub extended: TriangleField<Vector4<f64>>,
}

/// Characteristic frame of `D̃`: `X = 1 - (x + y)/2`, `Y = (x - y)/2`.
/// `Y = 0` is the diagonal `y = x` and `X + Y = 1` is the base `y = 0`.
pub fn d_tilde_frame() -> CharFrame {
    CharFrame::new((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)).expect("null directions")
}

/// Builds `K` on `D` with spacing `1/m`, going through `D̃` at spacing `1/(2m)`
/// in characteristic coordinates so that every node of `D` is a lattice node.
pub fn build_kernel(p: &MatrixPotential, q: &MatrixPotential, m: usize) -> Result<KernelField> {
    if m < 4 {
        return Err(Error::Configuration(format!("kernel resolution {m} below 4")));
    }
    let n = 2 * m;
    let frame = d_tilde_frame();
    let s_grid = Grid1D::new(0.0, 1.0, n + 1)?;
    let x_grid = Grid1D::new(0.0, 2.0, 2 * n + 1)?;
    let q_ext = extend_potential(q);
    let q_samples = q_ext.sample(&x_grid)?;
    let p_samples = p.sample(&s_grid)?;
    let scale = frame.scale();
    // x = (n - i + j) h, y = (n - i - j) h on the characteristic lattice.
    let r = TriangleField::from_fn(DomainTag::CharTriangle, n, |node| {
        let xi = n - node.i + node.j;
        let yi = n - node.i - node.j;
        r_matrix(&p_samples[yi], &q_samples[xi]) * scale
    })?;

    let qp_int = q.integral_on(&s_grid)?;
    let pp_int = p.integral_on(&s_grid)?;
    let q_vals = q.sample(&s_grid)?;
    // F(X) = K_v(1 - X, 1 - X) = ½∫_0^{1-X}(Q - P), F'(X) = -½(Q - P)(1 - X)
    let f: Vec<Vector4<f64>> = (0..=n).map(|i| vectorize(&((qp_int[n - i] - pp_int[n - i]) * 0.5))).collect();
    let f_prime: Vec<Vector4<f64>> = (0..=n)
        .map(|i| vectorize(&((q_vals[n - i] - p_samples[n - i]) * -0.5)))
        .collect();
    let zeros = vec![Vector4::zeros(); n + 1];
    let problem = GoursatProblem::with_derivatives(GoursatConfig::SideAndNormal, r, f, zeros.clone(), f_prime, zeros)?;
    let sol = picard_solve(&problem, PicardOptions::default()).map_err(|e| match e {
        Error::Divergence { increments } => Error::Divergence { increments },
        other => Error::Configuration(format!("kernel Goursat solve failed: {other}")),
    })?;

    let lift = |p_idx: usize, q_idx: usize| (2 * m - p_idx - q_idx, p_idx - q_idx);
    let k = TriangleField::from_fn(DomainTag::D, m, |node| {
        let (i, j) = lift(node.i, node.j);
        unvectorize(sol.k.at(i, j))
    })?;
    let grads: Vec<(Matrix2<f64>, Matrix2<f64>)> = k
        .nodes()
        .iter()
        .map(|node| {
            let (i, j) = lift(node.i, node.j);
            let (gx, gy) = frame.physical_gradient(*sol.k_x.at(i, j), *sol.k_y.at(i, j));
            (unvectorize(&gx), unvectorize(&gy))
        })
        .collect();
    let kx = k.with_values(grads.iter().map(|g| g.0).collect())?;
    let ky = k.with_values(grads.iter().map(|g| g.1).collect())?;
    Ok(KernelField {
        p: p.clone(),
        q: q.clone(),
        k,
        kx,
        ky,
        iterations: sol.iterations,
        extended: sol.k,
    })
}

/// Maxima of the defining identities on the lattice of `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelChecks {
    /// `sup_x |K(x, x) - ½∫_0^x (Q - P)|`, entrywise.
    pub trace_error: f64,
    /// `sup_x |K_y(x, 0)|`.
    pub normal_error: f64,
    /// Finite-difference residual of the PDE on interior nodes.
    pub pde_residual: f64,
    pub sup_k: f64,
    /// `sup |K - Kᵀ|`, reported only.
    pub asymmetry: f64,
}

impl KernelField {
    pub fn resolution(&self) -> usize {
        self.k.resolution()
    }

    pub fn grid(&self) -> Grid1D {
        Grid1D::new(0.0, 1.0, self.resolution() + 1).expect("resolution >= 4")
    }

    /// `K(1, y_q)` for `q = 0..=m`.
    pub fn at_x1(&self) -> Vec<Matrix2<f64>> {
        let m = self.resolution();
        (0..=m).map(|q| *self.k.at(m, q)).collect()
    }

    /// `K_x(1, y_q)` for `q = 0..=m`.
    pub fn kx_at_x1(&self) -> Vec<Matrix2<f64>> {
        let m = self.resolution();
        (0..=m).map(|q| *self.kx.at(m, q)).collect()
    }

    /// `½∫_0^x (Q - P)` on the kernel grid.
    pub fn trace_target(&self) -> Result<Vec<Matrix2<f64>>> {
        let grid = self.grid();
        let qi = self.q.integral_on(&grid)?;
        let pi = self.p.integral_on(&grid)?;
        Ok(qi.iter().zip(&pi).map(|(a, b)| (a - b) * 0.5).collect())
    }

    pub fn checks(&self) -> Result<KernelChecks> {
        let m = self.resolution();
        let h = 1.0 / m as f64;
        let target = self.trace_target()?;
        let trace_error = (0..=m)
            .map(|p| (self.k.at(p, p) - target[p]).amax())
            .fold(0.0, f64::max);
        let normal_error = (0..=m).map(|p| self.ky.at(p, 0).amax()).fold(0.0, f64::max);
        let grid = self.grid();
        let pv = self.p.sample(&grid)?;
        let qv = self.q.sample(&grid)?;
        let pde_residual = self
            .k
            .nodes()
            .par_iter()
            .filter(|nd| nd.j >= 1 && nd.i > nd.j && nd.i < m)
            .map(|nd| {
                let (p, q) = (nd.i, nd.j);
                let c = self.k.at(p, q);
                let kxx = (self.k.at(p + 1, q) + self.k.at(p - 1, q) - c * 2.0) / (h * h);
                let kyy = (self.k.at(p, q + 1) + self.k.at(p, q - 1) - c * 2.0) / (h * h);
                (kxx - kyy + c * pv[q] - qv[p] * c).amax()
            })
            .reduce(|| 0.0, f64::max);
        let sup_k = self.k.values.iter().map(|v| v.amax()).fold(0.0, f64::max);
        let asymmetry = self.k.values.iter().map(|v| (v - v.transpose()).amax()).fold(0.0, f64::max);
        Ok(KernelChecks {
            trace_error,
            normal_error,
            pde_residual,
            sup_k,
            asymmetry,
        })
    }

    // Weights of ∫_0^{x_p} on the first p + 1 nodes.
    fn row_weights(&self, p: usize) -> Vec<f64> {
        if p == 0 {
            vec![0.0]
        } else {
            interval_rule_weights(p + 1, 1.0 / self.resolution() as f64)
        }
    }

    /// `(∫_0^x K ψ, ∫_0^x K_x ψ)` at every grid node, `ψ` given on the kernel grid.
    fn integrals(&self, psi: &[Vector2<f64>]) -> Vec<(Vector2<f64>, Vector2<f64>)> {
        let m = self.resolution();
        (0..=m)
            .into_par_iter()
            .map(|p| {
                let w = self.row_weights(p);
                let mut a = Vector2::zeros();
                let mut b = Vector2::zeros();
                for (q, wq) in w.iter().enumerate() {
                    a += self.k.at(p, q) * psi[q] * *wq;
                    b += self.kx.at(p, q) * psi[q] * *wq;
                }
                (a, b)
            })
            .collect()
    }

    /// `Φ'(1)` for `Φ = Ψ + ∫ K Ψ`, `Ψ` the Neumann fundamental matrix of `P`.
    pub fn transported_endpoint(&self, problem: &SpectralProblem, lambda: f64) -> Result<Matrix2<f64>> {
        let fm = problem.fundamental_matrix(lambda)?;
        let grid = self.grid();
        let m = self.resolution();
        let mut out = Matrix2::zeros();
        for c in 0..2 {
            let xi = if c == 0 { Vector2::x() } else { Vector2::y() };
            let (psi, dpsi) = fm.apply(&xi);
            let psi = psi.resample(&grid)?;
            let dpsi1 = dpsi.values[dpsi.values.len() - 1];
            let w = self.row_weights(m);
            let mut integral = Vector2::zeros();
            for (q, wq) in w.iter().enumerate() {
                integral += self.kx.at(m, q) * psi.values[q] * *wq;
            }
            let col = dpsi1 + self.k.at(m, m) * psi.values[m] + integral;
            out.set_column(c, &col);
        }
        Ok(out)
    }

    /// `det Φ'(1; λ)`; its zeros are the Neumann spectrum of `Q`.
    pub fn transported_characteristic(&self, problem: &SpectralProblem, lambda: f64) -> Result<f64> {
        Ok(self.transported_endpoint(problem, lambda)?.determinant())
    }

    /// First `count` zeros of [`KernelField::transported_characteristic`].
    pub fn transported_spectrum(&self, problem: &SpectralProblem, count: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.q.eigen_range(problem.grid())?;
        let mut roots = scan_characteristic(&|l| self.transported_characteristic(problem, l), lo, hi, count)?;
        roots.truncate(count);
        Ok(roots)
    }
}

/// `Φ` with its derivative and the measured Q-equation residual.
#[derive(Debug, Clone)]
pub struct TransformedSolution {
    pub phi: VectorValuedField,
    pub dphi: VectorValuedField,
    pub lambda: f64,
    pub xi: Vector2<f64>,
    /// `sup |-Φ'' + QΦ - λΦ|` over the grid.
    pub residual: f64,
}

/// Transformation with `ψ'` taken by finite differences.
pub fn transform_solution(kernel: &KernelField, psi: &VectorValuedField, lambda: f64) -> Result<TransformedSolution> {
    let dpsi = psi.derivative(1)?;
    transform_pair(kernel, psi, &dpsi, lambda)
}

/// `Φ = ψ + ∫_0^x K ψ`, `Φ' = ψ' + K(x, x)ψ + ∫_0^x K_x ψ`.
///
/// `ψ` must solve `-ψ'' + Pψ = λψ` with `ψ'(0) = 0`; a residual above
/// `1e-5 (1 + |λ|) max(1, sup|ψ|)` is a precondition error.
pub fn transform_pair(
    kernel: &KernelField,
    psi: &VectorValuedField,
    dpsi: &VectorValuedField,
    lambda: f64,
) -> Result<TransformedSolution> {
    let grid = kernel.grid();
    let psi = psi.resample(&grid)?;
    let dpsi = dpsi.resample(&grid)?;
    let scale = (1.0 + lambda.abs()) * psi.sup_norm().max(1.0);
    let pv = kernel.p.sample(&grid)?;
    let input_residual = equation_residual(&psi, &pv, lambda)?;
    if input_residual > 1e-5 * scale {
        return Err(Error::Precondition(format!(
            "ψ does not solve the P-equation at λ = {lambda}: residual {input_residual:e}"
        )));
    }
    if dpsi.values[0].amax() > 1e-5 * scale {
        return Err(Error::Precondition(format!(
            "ψ'(0) = {:?} is not zero",
            dpsi.values[0]
        )));
    }
    let ints = kernel.integrals(&psi.values);
    let m = kernel.resolution();
    let phi: Vec<Vector2<f64>> = (0..=m).map(|p| psi.values[p] + ints[p].0).collect();
    let dphi: Vec<Vector2<f64>> = (0..=m)
        .map(|p| dpsi.values[p] + kernel.k.at(p, p) * psi.values[p] + ints[p].1)
        .collect();
    let phi = VectorValuedField::new(grid.clone(), phi)?;
    let dphi = VectorValuedField::new(grid.clone(), dphi)?;
    let qv = kernel.q.sample(&grid)?;
    let residual = transformed_residual(&phi, &dphi, &qv, lambda)?;
    Ok(TransformedSolution {
        xi: psi.values[0],
        phi,
        dphi,
        lambda,
        residual,
    })
}

fn equation_residual(f: &VectorValuedField, pot: &[Matrix2<f64>], lambda: f64) -> Result<f64> {
    let d2 = f.derivative(2)?;
    Ok(f.values
        .iter()
        .zip(&d2.values)
        .zip(pot)
        .map(|((v, d), p)| (-d + p * v - v * lambda).amax())
        .fold(0.0, f64::max))
}

fn transformed_residual(phi: &VectorValuedField, dphi: &VectorValuedField, q: &[Matrix2<f64>], lambda: f64) -> Result<f64> {
    let grid = &phi.grid;
    let mut worst = 0.0f64;
    for c in 0..2 {
        let d2 = differentiate(grid, &dphi.component(c), 1)?;
        for (k, d) in d2.iter().enumerate() {
            let qphi = q[k] * phi.values[k];
            worst = worst.max((-d + qphi[c] - lambda * phi.values[k][c]).abs());
        }
    }
    Ok(worst)
}

/// Weights for `∫_0^1` on the kernel grid.
pub fn unit_weights(kernel: &KernelField) -> Vec<f64> {
    interval_rule_weights(kernel.resolution() + 1, 1.0 / kernel.resolution() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Scalar kernel for P = 0, Q = c: (cx/2) Σ (c(x² - y²)/4)^k / (k!(k+1)!).
    fn scalar_kernel(c: f64, x: f64, y: f64) -> f64 {
        let z = c * (x * x - y * y) / 4.0;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..40 {
            if k > 0 {
                term *= z / (k as f64 * (k + 1) as f64);
            }
            sum += term;
        }
        c * x / 2.0 * sum
    }

    #[test]
    fn r_matrix_examples() {
        let r = r_matrix(&Matrix2::new(1.0, 0.0, 0.0, 2.0), &Matrix2::new(3.0, 0.0, 0.0, 4.0));
        assert_eq!(r, Matrix4::from_diagonal(&Vector4::new(2.0, 1.0, 3.0, 2.0)));
        let r = r_matrix(&Matrix2::new(0.0, 0.5, 0.5, 0.0), &Matrix2::zeros());
        for (a, b) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert_eq!(r[(a, b)], -0.5);
        }
        assert_eq!(r.iter().filter(|v| **v != 0.0).count(), 4);
        assert_eq!(r_matrix(&Matrix2::zeros(), &Matrix2::zeros()), Matrix4::zeros());
    }

    #[test]
    fn r_matches_matrix_products() {
        let p = Matrix2::new(1.0, 0.3, 0.3, -2.0);
        let q = Matrix2::new(0.5, -0.7, -0.7, 4.0);
        let k = Matrix2::new(1.0, 2.0, 3.0, 4.0);
        assert!((r_matrix(&p, &q) * vectorize(&k) - vectorize(&(q * k - k * p))).amax() < 1e-15);
    }

    #[test]
    fn constant_shift_kernel() {
        let p = MatrixPotential::zero();
        let q = MatrixPotential::diagonal(1.0, 1.0);
        let kf = build_kernel(&p, &q, 40).unwrap();
        let m = 40;
        for d in 0..=m {
            let x = d as f64 / m as f64;
            let k = kf.k.at(d, d);
            assert!((k - Matrix2::identity() * (x / 2.0)).amax() < 1e-7);
        }
        let k = kf.k.at(40, 20);
        assert!((k[(0, 0)] - scalar_kernel(1.0, 1.0, 0.5)).abs() < 1e-7);
        assert!((scalar_kernel(1.0, 1.0, 0.5) - 0.5483629478574267).abs() < 1e-15);
        assert!(k[(0, 1)] == 0.0 && k[(1, 0)] == 0.0);
        let c = kf.checks().unwrap();
        assert!(c.trace_error < 1e-12 && c.normal_error < 1e-9 && c.pde_residual < 1e-3, "{c:?}");
    }

    #[test]
    fn equal_potentials_give_zero_kernel() {
        let p = MatrixPotential::parse("1 + 0.2*cos(pi*x)", "0.3", None, "2").unwrap();
        let kf = build_kernel(&p, &p, 20).unwrap();
        assert_eq!(kf.checks().unwrap().sup_k, 0.0);
    }
}
