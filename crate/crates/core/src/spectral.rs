//! Neumann spectrum of `-d²/dx² + P(x)` on `(0, 1)` for a symmetric 2x2
//! potential, by shooting with the fundamental matrix.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{simpson_weights, Grid1D, VectorValuedField};
use crate::potential::{sym_eigenvalues, MatrixPotential};

/// Samples per unit of `sqrt(lambda)` in the root scan.
pub const SCAN_DENSITY: f64 = 40.0;

/// Relative gap below which two eigenvalues count as one cluster.
pub const SIMPLICITY_TOL: f64 = 1e-6;

/// `-y'' + P y = lambda y` on `[0, 1]` with Neumann conditions.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    potential: MatrixPotential,
    grid: Grid1D,
    at_nodes: Vec<Matrix2<f64>>,
    at_mid: Vec<Matrix2<f64>>,
    p_min: f64,
    p_max: f64,
}

impl SpectralProblem {
    /// Problem on `grid`, whose step is also the integrator step.
    pub fn new(potential: MatrixPotential, grid: Grid1D) -> Result<Self> {
        if grid.lo() != 0.0 || grid.hi() != 1.0 {
            return Err(Error::Domain(format!(
                "spectral grid must span [0, 1], got [{}, {}]",
                grid.lo(),
                grid.hi()
            )));
        }
        let at_nodes = potential.sample(&grid)?;
        let h = grid.spacing();
        let at_mid = grid.points()[..grid.len() - 1]
            .iter()
            .map(|&x| potential.eval(x + 0.5 * h))
            .collect::<Result<Vec<_>>>()?;
        let (mut p_min, mut p_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for m in at_nodes.iter().chain(&at_mid) {
            let (lo, hi) = sym_eigenvalues(m);
            p_min = p_min.min(lo);
            p_max = p_max.max(hi);
        }
        Ok(Self {
            potential,
            grid,
            at_nodes,
            at_mid,
            p_min,
            p_max,
        })
    }

    /// Problem on the default 401-node grid.
    pub fn with_default_grid(potential: MatrixPotential) -> Result<Self> {
        Self::new(potential, Grid1D::unit_default())
    }

    pub fn potential(&self) -> &MatrixPotential {
        &self.potential
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.grid.spacing()
    }

    /// Range of the eigenvalues of `P(x)` over the integrator nodes.
    pub fn potential_bounds(&self) -> (f64, f64) {
        (self.p_min, self.p_max)
    }

    fn check_step(&self, lambda: f64) -> Result<()> {
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
        }
        let omega2 = (lambda - self.p_min).abs().max((lambda - self.p_max).abs());
        if self.step() * omega2.sqrt() > 1.0 {
            return Err(Error::StepSize {
                lambda,
                suggested_step: 0.5 / omega2.sqrt(),
            });
        }
        Ok(())
    }

    // One RK4 march; `visit` sees (node index, Psi, Psi').
    fn march(&self, lambda: f64, mut visit: impl FnMut(usize, &Matrix2<f64>, &Matrix2<f64>)) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        self.check_step(lambda)?;
        let h = self.step();
        let shift = Matrix2::identity() * lambda;
        let mut y = Matrix2::identity();
        let mut z = Matrix2::zeros();
        visit(0, &y, &z);
        for k in 0..self.grid.len() - 1 {
            let a0 = self.at_nodes[k] - shift;
            let am = self.at_mid[k] - shift;
            let a1 = self.at_nodes[k + 1] - shift;
            let k1y = z;
            let k1z = a0 * y;
            let k2y = z + k1z * (0.5 * h);
            let k2z = am * (y + k1y * (0.5 * h));
            let k3y = z + k2z * (0.5 * h);
            let k3z = am * (y + k2y * (0.5 * h));
            let k4y = z + k3z * h;
            let k4z = a1 * (y + k3y * h);
            y += (k1y + (k2y + k3y) * 2.0 + k4y) * (h / 6.0);
            z += (k1z + (k2z + k3z) * 2.0 + k4z) * (h / 6.0);
            visit(k + 1, &y, &z);
        }
        if !(y.iter().chain(z.iter()).all(|v| v.is_finite())) {
            let omega = (lambda - self.p_min).abs().max(1.0).sqrt();
            return Err(Error::StepSize {
                lambda,
                suggested_step: 0.5 / omega,
            });
        }
        Ok((y, z))
    }

    /// `Psi(x; lambda)` and `Psi'(x; lambda)` on the grid, with `Psi(0) = I`
    /// and `Psi'(0) = 0`.
    pub fn fundamental_matrix(&self, lambda: f64) -> Result<FundamentalMatrix> {
        let n = self.grid.len();
        let mut psi = Vec::with_capacity(n);
        let mut dpsi = Vec::with_capacity(n);
        self.march(lambda, |_, y, z| {
            psi.push(*y);
            dpsi.push(*z);
        })?;
        Ok(FundamentalMatrix {
            grid: self.grid.clone(),
            lambda,
            psi,
            dpsi,
        })
    }

    /// `(Psi(1; lambda), Psi'(1; lambda))`.
    pub fn endpoint_matrices(&self, lambda: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        self.march(lambda, |_, _, _| {})
    }

    /// `det Psi'(1; lambda)`, zero exactly at the Neumann eigenvalues.
    pub fn characteristic_value(&self, lambda: f64) -> Result<f64> {
        Ok(self.endpoint_matrices(lambda)?.1.determinant())
    }
}

/// Sampled fundamental matrix.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub grid: Grid1D,
    pub lambda: f64,
    pub psi: Vec<Matrix2<f64>>,
    pub dpsi: Vec<Matrix2<f64>>,
}

impl FundamentalMatrix {
    /// The solution `Psi xi` and its derivative.
    pub fn apply(&self, xi: &Vector2<f64>) -> (VectorValuedField, VectorValuedField) {
        let f = VectorValuedField {
            grid: self.grid.clone(),
            values: self.psi.iter().map(|m| m * xi).collect(),
        };
        let d = VectorValuedField {
            grid: self.grid.clone(),
            values: self.dpsi.iter().map(|m| m * xi).collect(),
        };
        (f, d)
    }
}

/// One Neumann eigenpair, normalized by `|psi(0)| = 1`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// 1-based position in the increasing spectrum.
    pub index: usize,
    pub lambda: f64,
    pub eigenfunction: VectorValuedField,
    pub derivative: VectorValuedField,
    pub rho: f64,
    pub endpoint0: Vector2<f64>,
    pub endpoint1: Vector2<f64>,
}

/// The first `N` eigenpairs of a problem.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub problem: SpectralProblem,
    pub pairs: Vec<EigenPair>,
}

impl SpectrumTable {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn simplicity(&self) -> SimplicityReport {
        check_simplicity(&self.lambdas(), self.problem.potential())
    }
}

fn cluster_tol(lambda: f64) -> f64 {
    SIMPLICITY_TOL * (1.0 + lambda.abs())
}

/// The first `count` eigenvalues with multiplicity (a double root appears
/// twice). No simplicity check is made.
pub fn locate_eigenvalues(problem: &SpectralProblem, count: usize) -> Result<Vec<f64>> {
    let mut roots = scan_roots(problem, count)?;
    roots.truncate(count);
    Ok(roots)
}

// Up to `count + 1` roots, so that the last requested one can be checked
// against its successor.
fn scan_roots(problem: &SpectralProblem, count: usize) -> Result<Vec<f64>> {
    let (p_min, p_max) = problem.potential_bounds();
    scan_characteristic(&|l| problem.characteristic_value(l), p_min, p_max, count)
}

/// Up to `count + 1` roots (with multiplicity) of a Neumann characteristic
/// function for a potential whose eigenvalues lie in `[p_min, p_max]`.
///
/// `λ = p_min - 1 + s²` is sampled uniformly in `s`; sign changes are bisected
/// and sign-preserving dips are refined for root pairs and double roots.
pub fn scan_characteristic<F>(f: &F, p_min: f64, p_max: f64, count: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if count == 0 {
        return Err(Error::Domain("eigenvalue count must be at least 1".into()));
    }
    let lo = p_min - 1.0;
    let hi = (count as f64 * std::f64::consts::PI).powi(2) + p_max + 1.0;
    let s_max = (hi - lo).sqrt();
    let ds = 1.0 / SCAN_DENSITY;
    let total = (s_max / ds).ceil() as usize + 1;
    let lambda_at = |k: usize| lo + (k as f64 * ds).powi(2);

    let mut roots: Vec<f64> = Vec::new();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let chunk = 128;
    let mut next = 0;
    // Roots found while scanning samples[k-1..=k+1] are attributed to k, so a
    // sample stays pending until its right neighbour exists.
    let mut examined = 0;
    while next < total && roots.len() < count + 1 {
        let end = (next + chunk).min(total);
        let fresh = (next..end)
            .into_par_iter()
            .map(|k| {
                let l = lambda_at(k);
                f(l).map(|v| (l, v))
            })
            .collect::<Result<Vec<_>>>()?;
        samples.extend(fresh);
        next = end;
        while examined + 1 < samples.len() {
            scan_interval(f, &samples, examined, &mut roots)?;
            examined += 1;
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    if roots.len() < count {
        return Err(Error::ScanRange {
            requested: count,
            found: roots.len(),
            lo,
            hi: lambda_at(next.saturating_sub(1)),
        });
    }
    roots.truncate(count + 1);
    Ok(roots)
}

// Examines sample k (exact zeros and dips) and the interval (k, k+1).
fn scan_interval<F: Fn(f64) -> Result<f64>>(f: &F, s: &[(f64, f64)], k: usize, roots: &mut Vec<f64>) -> Result<()> {
    let (l0, f0) = s[k];
    let (l1, f1) = s[k + 1];
    if f0 == 0.0 {
        let before = if k > 0 { s[k - 1].1 } else { f1 };
        if before * f1 < 0.0 || k == 0 {
            roots.push(l0);
        } else {
            roots.push(l0);
            roots.push(l0);
        }
        return Ok(());
    }
    if f1 != 0.0 && f0 * f1 < 0.0 {
        roots.push(bisect(f, l0, f0, l1)?);
        return Ok(());
    }
    if k > 0 && f1 != 0.0 {
        let (lm, fm) = s[k - 1];
        if fm != 0.0 && fm * f0 > 0.0 && f0 * f1 > 0.0 && f0.abs() < fm.abs() && f0.abs() < f1.abs() {
            refine_dip(f, lm, l1, f0.signum(), fm.abs().max(f1.abs()), roots)?;
        }
    }
    Ok(())
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut fa: f64, mut b: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || (b - a) <= 2.0 * f64::EPSILON * m.abs().max(1.0) {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

// A local minimum of |det| without a sign change may hide a root pair or a
// double root.
fn refine_dip<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, sign: f64, scale: f64, roots: &mut Vec<f64>) -> Result<()> {
    let g = |l: f64| f(l).map(|v| sign * v);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    for _ in 0..200 {
        if gc < 0.0 || gd < 0.0 || (b - a) <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    let (lmin, gmin) = if gc < gd { (c, gc) } else { (d, gd) };
    if gmin < 0.0 {
        let fa = sign * g(a)?;
        roots.push(bisect(f, a, fa, lmin)?);
        let fm = sign * gmin;
        roots.push(bisect(f, lmin, fm, b)?);
    } else if gmin <= 1e-8 * scale {
        roots.push(lmin);
        roots.push(lmin);
    }
    Ok(())
}

/// Minimal gap, clusters, and (for constant potentials) the exact
/// disjointness test of the diagonalized spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicityReport {
    pub min_gap: f64,
    pub clusters: Vec<Vec<f64>>,
    pub simple: bool,
    /// For constant `P`: whether `{(kπ)² + p1}` and `{(kπ)² + p2}` are
    /// disjoint, `p1, p2` being the eigenvalues of `P`.
    pub constant_spectra_disjoint: Option<bool>,
}

/// Simplicity diagnostics for eigenvalues listed with multiplicity.
pub fn check_simplicity(lambdas: &[f64], potential: &MatrixPotential) -> SimplicityReport {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut min_gap = f64::INFINITY;
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    let mut current: Vec<f64> = Vec::new();
    for w in sorted.windows(2) {
        let gap = w[1] - w[0];
        min_gap = min_gap.min(gap);
        if gap < cluster_tol(w[0]) {
            if current.is_empty() {
                current.push(w[0]);
            }
            current.push(w[1]);
        } else if !current.is_empty() {
            clusters.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        clusters.push(current);
    }
    let constant_spectra_disjoint = potential.as_constant().map(|m| {
        let (p1, p2) = sym_eigenvalues(&m);
        let d = (p2 - p1) / (std::f64::consts::PI * std::f64::consts::PI);
        let m_int = d.round();
        // (kπ)² + p1 = (jπ)² + p2  <=>  k² - j² = d for integers k, j >= 0,
        // solvable exactly when d is an integer not congruent to 2 mod 4.
        let is_integer = (d - m_int).abs() <= 1e-12 * (1.0 + d.abs());
        !(is_integer && (m_int as i64).rem_euclid(4) != 2)
    });
    SimplicityReport {
        min_gap,
        simple: clusters.is_empty(),
        clusters,
        constant_spectra_disjoint,
    }
}

/// First `count` eigenpairs in increasing order.
pub fn find_spectrum(problem: &SpectralProblem, count: usize) -> Result<SpectrumTable> {
    let roots = scan_roots(problem, count)?;
    let report = check_simplicity(&roots, problem.potential());
    if let Some(cluster) = report.clusters.first() {
        return Err(Error::SimplicityViolation {
            cluster: cluster.clone(),
            tolerance: cluster_tol(cluster[0]),
        });
    }
    let pairs = roots[..count]
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| eigenpair(problem, i + 1, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        problem: problem.clone(),
        pairs,
    })
}

/// Eigenpair at a known eigenvalue.
pub fn eigenpair(problem: &SpectralProblem, index: usize, lambda: f64) -> Result<EigenPair> {
    let fm = problem.fundamental_matrix(lambda)?;
    let end = fm.dpsi[fm.dpsi.len() - 1];
    let mut xi = smallest_right_singular(&end);
    let lead = if xi[0].abs() > 1e-12 { xi[0] } else { xi[1] };
    if lead < 0.0 {
        xi = -xi;
    }
    let (eigenfunction, derivative) = fm.apply(&xi);
    let w = simpson_weights(eigenfunction.grid.len(), eigenfunction.grid.spacing());
    let rho = eigenfunction
        .values
        .iter()
        .zip(&w)
        .map(|(v, w)| w * v.norm_squared())
        .sum();
    let endpoint1 = eigenfunction.values[eigenfunction.values.len() - 1];
    Ok(EigenPair {
        index,
        lambda,
        eigenfunction,
        derivative,
        rho,
        endpoint0: xi,
        endpoint1,
    })
}

/// Unit vector spanning the smallest singular direction of `a`.
pub fn smallest_right_singular(a: &Matrix2<f64>) -> Vector2<f64> {
    let m = a.transpose() * a;
    let (lo, _) = sym_eigenvalues(&m);
    let v1 = Vector2::new(m[(0, 1)], lo - m[(0, 0)]);
    let v2 = Vector2::new(lo - m[(1, 1)], m[(0, 1)]);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let n = v.norm();
    if n <= f64::MIN_POSITIVE || !n.is_finite() {
        // m is a multiple of the identity: any direction works.
        return Vector2::new(1.0, 0.0);
    }
    v / n
}

/// Inner products `(a, psi_n)` against a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingReport {
    pub products: Vec<f64>,
    pub verdict: bool,
    /// 1-based index of the first mode with `|(a, psi_n)| <= tol`.
    pub first_vanishing: Option<usize>,
}

pub fn generating_element_check(table: &SpectrumTable, a: &VectorValuedField, tol: f64) -> Result<GeneratingReport> {
    let grid = table.problem.grid();
    let a = a.resample(grid)?;
    let products = table
        .pairs
        .iter()
        .map(|p| a.inner(&p.eigenfunction))
        .collect::<Result<Vec<_>>>()?;
    let first_vanishing = products.iter().position(|v| v.abs() <= tol).map(|i| i + 1);
    Ok(GeneratingReport {
        verdict: first_vanishing.is_none(),
        products,
        first_vanishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn diag12() -> SpectralProblem {
        SpectralProblem::with_default_grid(MatrixPotential::diagonal(1.0, 2.0)).unwrap()
    }

    #[test]
    fn zero_potential_at_pi_squared() {
        let p = SpectralProblem::with_default_grid(MatrixPotential::zero()).unwrap();
        let f = p.fundamental_matrix(PI * PI).unwrap();
        for (x, m) in f.grid.points().iter().zip(&f.psi) {
            let c = (PI * x).cos();
            assert!((m - Matrix2::identity() * c).amax() < 1e-8);
        }
        assert!(f.dpsi.last().unwrap().amax() < 1e-7);
        let id = p.fundamental_matrix(0.0).unwrap();
        assert!(id.psi.iter().all(|m| (m - Matrix2::identity()).amax() == 0.0));
    }

    #[test]
    fn diagonal_at_zero_is_cosh() {
        let f = diag12().fundamental_matrix(0.0).unwrap();
        for (x, m) in f.grid.points().iter().zip(&f.psi) {
            assert!((m[(0, 0)] - x.cosh()).abs() < 1e-10);
            assert!((m[(1, 1)] - (2f64.sqrt() * x).cosh()).abs() < 1e-10);
            assert!(m[(0, 1)] == 0.0 && m[(1, 0)] == 0.0);
        }
    }

    #[test]
    fn characteristic_value_examples() {
        let p = diag12();
        assert!(p.characteristic_value(1.0).unwrap().abs() < 1e-9);
        assert!(p.characteristic_value(PI * PI + 1.0).unwrap().abs() < 1e-8);
        // (-w1 sin w1)(-w2 sin w2), w_i = sqrt(5 - i)
        let (w1, w2) = (2.0f64, 3f64.sqrt());
        let oracle = w1 * w1.sin() * w2 * w2.sin();
        let v = p.characteristic_value(5.0).unwrap();
        assert!((v - oracle).abs() < 1e-8 && v.abs() > 1e-3);
    }

    #[test]
    fn huge_lambda_is_step_error() {
        assert!(matches!(diag12().characteristic_value(1e8), Err(Error::StepSize { .. })));
    }

    #[test]
    fn diag_spectrum_and_norming_constants() {
        let t = find_spectrum(&diag12(), 6).unwrap();
        let want = [1.0, 2.0, PI * PI + 1.0, PI * PI + 2.0, 4.0 * PI * PI + 1.0, 4.0 * PI * PI + 2.0];
        for (p, w) in t.pairs.iter().zip(want) {
            assert!((p.lambda - w).abs() < 1e-8 * w, "{} vs {w}", p.lambda);
            assert!((p.endpoint0.norm() - 1.0).abs() < 1e-12);
        }
        assert!((t.pairs[0].rho - 1.0).abs() < 1e-8);
        assert!((t.pairs[2].rho - 0.5).abs() < 1e-8);
        assert_eq!(t.pairs[0].endpoint0, Vector2::new(1.0, 0.0));
        assert_eq!(t.pairs[1].endpoint0, Vector2::new(0.0, 1.0));
    }

    #[test]
    fn coupled_constant_lowest_pair() {
        let p = MatrixPotential::parse("1", "0.3", None, "1").unwrap();
        let t = find_spectrum(&SpectralProblem::with_default_grid(p).unwrap(), 2).unwrap();
        assert!((t.pairs[0].lambda - 0.7).abs() < 1e-8);
        assert!((t.pairs[1].lambda - 1.3).abs() < 1e-8);
    }

    #[test]
    fn simplicity_reports() {
        let t = find_spectrum(&diag12(), 6).unwrap();
        let r = t.simplicity();
        assert!(r.simple && (r.min_gap - 1.0).abs() < 1e-8);
        assert_eq!(r.constant_spectra_disjoint, Some(true));

        let zero = SpectralProblem::with_default_grid(MatrixPotential::zero()).unwrap();
        let l = locate_eigenvalues(&zero, 4).unwrap();
        let r = check_simplicity(&l, zero.potential());
        assert!(!r.simple);
        assert_eq!(r.constant_spectra_disjoint, Some(false));
        assert!(matches!(find_spectrum(&zero, 4), Err(Error::SimplicityViolation { .. })));

        let near = SpectralProblem::with_default_grid(MatrixPotential::diagonal(1.0, 1.0 + 1e-12)).unwrap();
        match find_spectrum(&near, 2) {
            Err(Error::SimplicityViolation { cluster, .. }) => assert!((cluster[0] - 1.0).abs() < 1e-6),
            other => panic!("expected simplicity violation, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_spectra_criterion_on_constant_diagonal() {
        // p2 - p1 = 3π²: k² - j² = 3 has k = 2, j = 1.
        let p = MatrixPotential::diagonal(0.0, 3.0 * PI * PI);
        assert_eq!(check_simplicity(&[], &p).constant_spectra_disjoint, Some(false));
        let q = MatrixPotential::diagonal(0.0, 2.0 * PI * PI);
        assert_eq!(check_simplicity(&[], &q).constant_spectra_disjoint, Some(true));
    }

    #[test]
    fn generating_element_examples() {
        let t = find_spectrum(&diag12(), 6).unwrap();
        let g = t.problem.grid().clone();
        let ones = VectorValuedField::from_fn(g.clone(), |_| Vector2::new(1.0, 1.0));
        let r = generating_element_check(&t, &ones, 1e-8).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.first_vanishing, Some(3));
        let zero = VectorValuedField::zeros(g.clone());
        let r = generating_element_check(&t, &zero, 1e-8).unwrap();
        assert!(!r.verdict && r.products.iter().all(|v| *v == 0.0));

        // ∫(1 + x) cos(kπx) dx = ((-1)^k - 1)/(kπ)^2 vanishes for even k >= 2.
        let ramp = VectorValuedField::from_fn(g, |x| Vector2::new(1.0 + x, 1.0 + x));
        let r = generating_element_check(&t, &ramp, 1e-8).unwrap();
        let c = 2.0 / (PI * PI);
        for (got, want) in r.products.iter().zip([1.5, 1.5, c, c, 0.0, 0.0]) {
            assert!((got.abs() - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert_eq!(r.first_vanishing, Some(5));
    }

    #[test]
    fn smallest_singular_direction() {
        let v = smallest_right_singular(&Matrix2::new(0.0, 0.0, 0.0, 3.0));
        assert_eq!(v.abs(), Vector2::new(1.0, 0.0));
        let v = smallest_right_singular(&Matrix2::new(1.0, 1.0, 1.0, 1.0));
        assert!((v[0] + v[1]).abs() < 1e-15);
    }
}
