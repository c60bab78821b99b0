//! The 4-component hyperbolic system `k_XY = R(X, Y) k` in characteristic
//! coordinates, under three boundary layouts, solved by Picard iteration of
//! the equivalent Volterra equations.
//!
//! Layouts (unit lattice spacing `h = 1/n`):
//! * [`GoursatConfig::TwoSides`]: `k(X, 0) = F(X)`, `k(0, Y) = G(Y)`, on
//!   the square `[0, 1]^2`.
//! * [`GoursatConfig::CauchyOnAB`]: `k(X, 1 - X) = F(X)` and
//!   `(k_X + k_Y)(1 - Y, Y) / √2 = G(Y)` on the triangle `X + Y <= 1`.
//! * [`GoursatConfig::SideAndNormal`]: `k(X, 0) = F(X)` and the same normal
//!   data on `X + Y = 1`, on the triangle.

mod corpus;
mod sweep;

pub use corpus::{corpus_problems, CorpusProblem};

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{cumulative_integral, differentiate, DomainTag, Grid1D, TriangleField};
use sweep::{column_cumulative, differentiate_lines, row_cumulative, sup, sup_diff, V4};

/// Boundary layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoursatConfig {
    TwoSides,
    CauchyOnAB,
    SideAndNormal,
}

impl GoursatConfig {
    pub fn domain(self) -> DomainTag {
        match self {
            GoursatConfig::TwoSides => DomainTag::CharSquare,
            _ => DomainTag::CharTriangle,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GoursatConfig::TwoSides => "prop1",
            GoursatConfig::CauchyOnAB => "prop2",
            GoursatConfig::SideAndNormal => "prop3",
        }
    }
}

impl fmt::Display for GoursatConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GoursatConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prop1" | "two-sides" => Ok(GoursatConfig::TwoSides),
            "prop2" | "cauchy" => Ok(GoursatConfig::CauchyOnAB),
            "prop3" | "side-normal" => Ok(GoursatConfig::SideAndNormal),
            _ => Err(Error::Configuration(format!(
                "unknown Goursat configuration '{s}' (expected prop1, prop2 or prop3)"
            ))),
        }
    }
}

/// `(X, Y) = ((x + y) / 2, (x - y) / 2)`.
pub fn to_characteristic(x: f64, y: f64) -> (f64, f64) {
    (0.5 * (x + y), 0.5 * (x - y))
}

/// `(x, y) = (X + Y, X - Y)`.
pub fn from_characteristic(cx: f64, cy: f64) -> (f64, f64) {
    (cx + cy, cx - cy)
}

/// Affine map `(x, y) = origin + X e_X + Y e_Y` between a characteristic
/// lattice and the physical plane.
///
/// Both directions must be null for `∂²_x - ∂²_y`; then
/// `∂_X ∂_Y = s (∂²_x - ∂²_y)` with `s` = [`CharFrame::scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharFrame {
    pub origin: (f64, f64),
    pub e_x: (f64, f64),
    pub e_y: (f64, f64),
}

impl CharFrame {
    pub fn new(origin: (f64, f64), e_x: (f64, f64), e_y: (f64, f64)) -> Result<Self> {
        let (p, q) = e_x;
        let (r, s) = e_y;
        let tol = 1e-14 * (p.abs() + q.abs()) * (r.abs() + s.abs());
        if (p * s + q * r).abs() > tol || (q * s + p * r).abs() > tol || (p * r).abs() <= tol {
            return Err(Error::Domain(format!(
                "directions {e_x:?}, {e_y:?} are not a characteristic pair"
            )));
        }
        Ok(Self { origin, e_x, e_y })
    }

    /// `X = (x + y) / 2`, `Y = (x - y) / 2`.
    pub fn standard() -> Self {
        Self {
            origin: (0.0, 0.0),
            e_x: (1.0, 1.0),
            e_y: (1.0, -1.0),
        }
    }

    pub fn physical(&self, cx: f64, cy: f64) -> (f64, f64) {
        (
            self.origin.0 + cx * self.e_x.0 + cy * self.e_y.0,
            self.origin.1 + cx * self.e_x.1 + cy * self.e_y.1,
        )
    }

    /// Factor `s` in `∂_X ∂_Y = s (∂²_x - ∂²_y)`.
    pub fn scale(&self) -> f64 {
        self.e_x.0 * self.e_y.0
    }

    /// Physical gradient `(∂_x, ∂_y)` from characteristic derivatives.
    pub fn physical_gradient(&self, dx: V4, dy: V4) -> (V4, V4) {
        let (p, q) = self.e_x;
        let (r, s) = self.e_y;
        let det = p * s - q * r;
        ((dx * s - dy * q) / det, (dy * p - dx * r) / det)
    }
}

/// A discretized Goursat problem on the unit characteristic lattice.
#[derive(Debug, Clone)]
pub struct GoursatProblem {
    pub config: GoursatConfig,
    /// `R` at every lattice node.
    pub r: TriangleField<Matrix4<f64>>,
    /// Boundary data sampled at `s_k = k / n`.
    pub f: Vec<V4>,
    pub g: Vec<V4>,
    pub f_prime: Vec<V4>,
    pub g_prime: Vec<V4>,
}

impl GoursatProblem {
    /// Problem from sampled data; data derivatives are taken numerically.
    pub fn new(config: GoursatConfig, r: TriangleField<Matrix4<f64>>, f: Vec<V4>, g: Vec<V4>) -> Result<Self> {
        let n = r.resolution();
        check_data(n, &f, "F")?;
        check_data(n, &g, "G")?;
        let f_prime = data_derivative(&f)?;
        let g_prime = data_derivative(&g)?;
        Self::with_derivatives(config, r, f, g, f_prime, g_prime)
    }

    /// Problem with exact derivatives of the boundary data.
    pub fn with_derivatives(
        config: GoursatConfig,
        r: TriangleField<Matrix4<f64>>,
        f: Vec<V4>,
        g: Vec<V4>,
        f_prime: Vec<V4>,
        g_prime: Vec<V4>,
    ) -> Result<Self> {
        let n = r.resolution();
        if r.tag() != config.domain() {
            return Err(Error::Configuration(format!(
                "{config} needs R on the {} lattice, got {}",
                config.domain(),
                r.tag()
            )));
        }
        if n < 4 {
            return Err(Error::Configuration(format!("lattice resolution {n} below 4")));
        }
        for (name, d) in [("F", &f), ("G", &g), ("F'", &f_prime), ("G'", &g_prime)] {
            check_data(n, d, name)?;
        }
        if r.values.iter().any(|m| !m.iter().all(|v| v.is_finite())) {
            return Err(Error::Configuration("R contains non-finite entries".into()));
        }
        if config == GoursatConfig::TwoSides {
            let gap = (f[0] - g[0]).amax();
            if gap > 1e-10 * (1.0 + f[0].amax()) {
                return Err(Error::Configuration(format!(
                    "corner compatibility F(0) = G(0) violated by {gap:e}"
                )));
            }
        }
        Ok(Self {
            config,
            r,
            f,
            g,
            f_prime,
            g_prime,
        })
    }

    /// Problem from closed-form data on the unit lattice with `n` intervals.
    pub fn from_fn(
        config: GoursatConfig,
        n: usize,
        r: impl Fn(f64, f64) -> Matrix4<f64> + Sync,
        f: impl Fn(f64) -> V4,
        g: impl Fn(f64) -> V4,
    ) -> Result<Self> {
        let field = TriangleField::from_fn(config.domain(), n, |p| r(p.x, p.y))?;
        let s: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        Self::new(config, field, s.iter().map(|&v| f(v)).collect(), s.iter().map(|&v| g(v)).collect())
    }

    /// `R(X, Y) = s r(x(X, Y), y(X, Y))` for a physical coefficient `r`.
    pub fn assemble_rhs(
        config: GoursatConfig,
        n: usize,
        frame: &CharFrame,
        r: impl Fn(f64, f64) -> Result<Matrix4<f64>> + Sync,
    ) -> Result<TriangleField<Matrix4<f64>>> {
        let skeleton = TriangleField::from_fn(config.domain(), n, |p| (p.x, p.y))?;
        let s = frame.scale();
        let values = skeleton
            .values
            .par_iter()
            .map(|&(cx, cy)| {
                let (x, y) = frame.physical(cx, cy);
                r(x, y).map(|m| m * s)
            })
            .collect::<Result<Vec<_>>>()?;
        skeleton.with_values(values)
    }

    pub fn resolution(&self) -> usize {
        self.r.resolution()
    }

    pub fn spacing(&self) -> f64 {
        self.r.spacing()
    }

    /// Bound `M` measured from `R`: the largest row-sum norm of `R` and of its
    /// first divided differences along both lattice directions.
    pub fn measured_m(&self) -> f64 {
        let h = self.spacing();
        let norm = |m: &Matrix4<f64>| {
            (0..4)
                .map(|a| (0..4).map(|b| m[(a, b)].abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let mut m = 0.0f64;
        for p in self.r.nodes() {
            let here = self.r.at(p.i, p.j);
            m = m.max(norm(here));
            if let Some(next) = self.r.get(p.i + 1, p.j) {
                m = m.max(norm(&((next - here) / h)));
            }
            if let Some(next) = self.r.get(p.i, p.j + 1) {
                m = m.max(norm(&((next - here) / h)));
            }
        }
        m
    }
}

fn check_data(n: usize, d: &[V4], name: &str) -> Result<()> {
    if d.len() != n + 1 {
        return Err(Error::Configuration(format!(
            "boundary data {name} has {} samples, lattice needs {}",
            d.len(),
            n + 1
        )));
    }
    if d.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
        return Err(Error::Configuration(format!("boundary data {name} is not finite")));
    }
    Ok(())
}

fn data_derivative(d: &[V4]) -> Result<Vec<V4>> {
    let grid = Grid1D::new(0.0, 1.0, d.len())?;
    let mut out = vec![V4::zeros(); d.len()];
    for c in 0..4 {
        let comp: Vec<f64> = d.iter().map(|v| v[c]).collect();
        for (o, v) in out.iter_mut().zip(differentiate(&grid, &comp, 1)?) {
            o[c] = v;
        }
    }
    Ok(out)
}

/// The `R = 0` solution and its first derivatives.
#[derive(Debug, Clone)]
pub struct HomogeneousPart {
    pub k0: TriangleField<V4>,
    pub k0_x: TriangleField<V4>,
    pub k0_y: TriangleField<V4>,
}

/// d'Alembert-type solution of the layout's boundary conditions for `R = 0`.
///
/// * TwoSides: `F(X) + G(Y) - F(0)`.
/// * CauchyOnAB: `(F(X) + F(1 - Y)) / 2 - (1/√2) ∫_Y^{1-X} G`.
/// * SideAndNormal: `F(X) + F(1 - Y) - F(1) + √2 ∫_0^Y G`.
pub fn homogeneous_part(problem: &GoursatProblem) -> Result<HomogeneousPart> {
    let n = problem.resolution();
    let h = problem.spacing();
    let (f, g, fp) = (&problem.f, &problem.g, &problem.f_prime);
    let g_int = cumulative_integral(g, h);
    let tag = problem.config.domain();
    let build = |val: &dyn Fn(usize, usize) -> V4| TriangleField::from_fn(tag, n, |p| val(p.i, p.j));
    let out = match problem.config {
        GoursatConfig::TwoSides => HomogeneousPart {
            k0: build(&|i, j| f[i] + g[j] - f[0])?,
            k0_x: build(&|i, _| fp[i])?,
            k0_y: build(&|_, j| problem.g_prime[j])?,
        },
        GoursatConfig::CauchyOnAB => HomogeneousPart {
            k0: build(&|i, j| (f[i] + f[n - j]) * 0.5 - (g_int[n - i] - g_int[j]) / SQRT_2)?,
            k0_x: build(&|i, _| fp[i] * 0.5 + g[n - i] / SQRT_2)?,
            k0_y: build(&|_, j| -fp[n - j] * 0.5 + g[j] / SQRT_2)?,
        },
        GoursatConfig::SideAndNormal => HomogeneousPart {
            k0: build(&|i, j| f[i] + f[n - j] - f[n] + g_int[j] * SQRT_2)?,
            k0_x: build(&|i, _| fp[i])?,
            k0_y: build(&|_, j| -fp[n - j] + g[j] * SQRT_2)?,
        },
    };
    Ok(out)
}

/// Picard stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Stop once the sup increment is below `tolerance * max(1, ‖k0‖)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 60,
        }
    }
}

/// Converged solution with derivatives from the integral representation.
#[derive(Debug, Clone)]
pub struct GoursatSolution {
    pub config: GoursatConfig,
    pub k: TriangleField<V4>,
    pub k0: TriangleField<V4>,
    pub k_x: TriangleField<V4>,
    pub k_y: TriangleField<V4>,
    /// `∂_X ∂_Y k = R k` (the homogeneous part has no mixed derivative).
    pub k_xy: TriangleField<V4>,
    /// Number of Picard sweeps after `k⁽¹⁾ = k0`.
    pub iterations: usize,
    /// `‖k⁽ⁿ⁺¹⁾ - k⁽ⁿ⁾‖` for `n = 0, 1, ...` (the first entry is `‖k0‖`).
    pub increments: Vec<f64>,
    pub m: f64,
    // Second derivatives of k0, kept for the C² certificate.
    k0_second: [f64; 3],
    k0_first: [f64; 2],
}

// The correction integral (k - k0) and its first derivatives for g = R k.
struct Correction {
    w: TriangleField<V4>,
    w_x: TriangleField<V4>,
    w_y: TriangleField<V4>,
}

fn correction(config: GoursatConfig, g: &TriangleField<V4>, with_derivatives: bool) -> Correction {
    let n = g.resolution();
    match config {
        GoursatConfig::TwoSides => {
            let col = column_cumulative(g);
            let w = row_cumulative(&col);
            let (w_x, w_y) = if with_derivatives {
                (col, row_cumulative(g))
            } else {
                (w.clone(), w.clone())
            };
            Correction { w, w_x, w_y }
        }
        GoursatConfig::CauchyOnAB | GoursatConfig::SideAndNormal => {
            // H(i, j) = ∫_{X_i}^{1 - Y_j} g(ξ, Y_j) dξ
            let rc = row_cumulative(g);
            let hh = rc.with_values(
                rc.nodes()
                    .iter()
                    .map(|p| rc.at(n - p.j, p.j) - rc.at(p.i, p.j))
                    .collect(),
            )
            .expect("same lattice");
            let ch = column_cumulative(&hh);
            let w = if config == GoursatConfig::CauchyOnAB {
                // ∬ over {ξ > X, η > Y, ξ + η < 1}
                ch.with_values(ch.nodes().iter().map(|p| ch.at(p.i, n - p.i) - ch.at(p.i, p.j)).collect())
            } else {
                // -∬_{ω3} - 2∬_{ω4} = -C(i, j) - C(n - j, j)
                ch.with_values(ch.nodes().iter().map(|p| -ch.at(p.i, p.j) - ch.at(n - p.j, p.j)).collect())
            }
            .expect("same lattice");
            if !with_derivatives {
                return Correction {
                    w_x: w.clone(),
                    w_y: w.clone(),
                    w,
                };
            }
            let cg = column_cumulative(g);
            let (w_x, w_y) = if config == GoursatConfig::CauchyOnAB {
                (
                    cg.with_values(cg.nodes().iter().map(|p| cg.at(p.i, p.j) - cg.at(p.i, n - p.i)).collect()),
                    hh.with_values(hh.values.iter().map(|v| -v).collect()),
                )
            } else {
                (
                    Ok(cg.clone()),
                    hh.with_values(
                        hh.nodes()
                            .iter()
                            .map(|p| -hh.at(p.i, p.j) - cg.at(n - p.j, p.j))
                            .collect(),
                    ),
                )
            };
            Correction {
                w,
                w_x: w_x.expect("same lattice"),
                w_y: w_y.expect("same lattice"),
            }
        }
    }
}

fn apply_r(r: &TriangleField<Matrix4<f64>>, k: &TriangleField<V4>) -> TriangleField<V4> {
    let values = r.values.par_iter().zip(&k.values).map(|(m, v)| m * v).collect();
    k.with_values(values).expect("same lattice")
}

fn add(a: &TriangleField<V4>, b: &TriangleField<V4>) -> TriangleField<V4> {
    a.with_values(a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect())
        .expect("same lattice")
}

/// Fixed point of `k = k0 + 𝒯[R k]` by successive approximation from 0.
pub fn picard_solve(problem: &GoursatProblem, opts: PicardOptions) -> Result<GoursatSolution> {
    let hom = homogeneous_part(problem)?;
    let k0_norm = sup(&hom.k0);
    let stop = opts.tolerance * k0_norm.max(1.0);
    let mut increments = vec![k0_norm];
    let mut k = hom.k0.clone();
    let mut iterations = 0;
    let r_is_zero = problem.r.values.iter().all(|m| m.iter().all(|v| *v == 0.0));
    if !r_is_zero {
        loop {
            if iterations >= opts.max_iterations {
                return Err(Error::Divergence { increments });
            }
            let g = apply_r(&problem.r, &k);
            let next = add(&hom.k0, &correction(problem.config, &g, false).w);
            let inc = sup_diff(&next, &k);
            if !inc.is_finite() {
                increments.push(inc);
                return Err(Error::Divergence { increments });
            }
            increments.push(inc);
            iterations += 1;
            k = next;
            if inc < stop {
                break;
            }
            let tail = &increments[increments.len().saturating_sub(6)..];
            if tail.len() == 6 && tail.windows(2).all(|w| w[1] >= w[0]) {
                return Err(Error::Divergence { increments });
            }
        }
    }
    let g = apply_r(&problem.r, &k);
    let corr = correction(problem.config, &g, true);
    let k_x = add(&hom.k0_x, &corr.w_x);
    let k_y = add(&hom.k0_y, &corr.w_y);
    let k0_second = [
        sup(&differentiate_lines(&hom.k0_x, true)),
        0.0,
        sup(&differentiate_lines(&hom.k0_y, false)),
    ];
    Ok(GoursatSolution {
        config: problem.config,
        k,
        k0: hom.k0,
        k_x,
        k_y,
        k_xy: g,
        iterations,
        increments,
        m: problem.measured_m(),
        k0_second,
        k0_first: [sup(&hom.k0_x), sup(&hom.k0_y)],
    })
}

/// The a-posteriori estimates of the successive-approximation theory.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub m: f64,
    pub c0: f64,
    pub c0_bound: f64,
    pub c0_ok: bool,
    pub c2: f64,
    pub c2_bound: f64,
    pub c2_ok: bool,
    /// `δ_n <= 2 Mⁿ/(n!)² ‖k0‖` for every recorded increment (TwoSides only).
    pub picard_ok: Option<bool>,
}

impl GoursatSolution {
    /// `(k, ∂_X k, ∂_Y k, ∂_X ∂_Y k)`.
    pub fn solution_and_derivatives(
        &self,
    ) -> (&TriangleField<V4>, &TriangleField<V4>, &TriangleField<V4>, &TriangleField<V4>) {
        (&self.k, &self.k_x, &self.k_y, &self.k_xy)
    }

    pub fn resolution(&self) -> usize {
        self.k.resolution()
    }

    /// Discrete C² norm: the largest sup over `k` and its derivatives up to
    /// order two (second pure derivatives by differencing the first).
    pub fn c2_norm(&self) -> f64 {
        let kxx = differentiate_lines(&self.k_x, true);
        let kyy = differentiate_lines(&self.k_y, false);
        [sup(&self.k), sup(&self.k_x), sup(&self.k_y), sup(&kxx), sup(&self.k_xy), sup(&kyy)]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn k0_c2_norm(&self) -> f64 {
        [sup(&self.k0), self.k0_first[0], self.k0_first[1], self.k0_second[0], self.k0_second[1], self.k0_second[2]]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn bounds(&self) -> BoundReport {
        let k0 = sup(&self.k0);
        let c0 = sup(&self.k);
        let grow = self.m.exp();
        let slack = 1e-12 * c0.max(1.0);
        let c0_bound = grow * k0;
        let c2 = self.c2_norm();
        let c2_bound = 2.0 * grow * self.k0_c2_norm();
        let picard_ok = (self.config == GoursatConfig::TwoSides).then(|| {
            let mut factorial_sq = 1.0f64;
            self.increments.iter().enumerate().all(|(n, d)| {
                if n > 0 {
                    factorial_sq *= (n * n) as f64;
                }
                // Rounding floor: increments cannot resolve below a few ulps of k.
                *d <= 2.0 * self.m.powi(n as i32) / factorial_sq * k0 + 16.0 * f64::EPSILON * c0
            })
        });
        BoundReport {
            m: self.m,
            c0,
            c0_bound,
            c0_ok: c0 <= c0_bound + slack,
            c2,
            c2_bound,
            c2_ok: c2 <= c2_bound + slack,
            picard_ok,
        }
    }

    /// Value at `(X, Y)`: exact at nodes, bicubic inside the lattice where a
    /// full 4x4 stencil fits, bilinear otherwise.
    pub fn value_at(&self, cx: f64, cy: f64) -> Result<V4> {
        interpolate_lattice(&self.k, cx, cy)
    }
}

/// Interpolation on a characteristic lattice (see [`GoursatSolution::value_at`]).
pub fn interpolate_lattice(f: &TriangleField<V4>, cx: f64, cy: f64) -> Result<V4> {
    let n = f.resolution();
    let h = f.spacing();
    let (sx, sy) = (cx / h, cy / h);
    let slack = 1e-9;
    let inside = sx >= -slack
        && sy >= -slack
        && match f.tag() {
            DomainTag::CharSquare => sx <= n as f64 + slack && sy <= n as f64 + slack,
            _ => sx + sy <= n as f64 + slack,
        };
    if !inside {
        return Err(Error::Domain(format!("({cx}, {cy}) outside the {} lattice", f.tag())));
    }
    let (ri, rj) = (sx.round(), sy.round());
    if (sx - ri).abs() < 1e-9 && (sy - rj).abs() < 1e-9 {
        if let Some(v) = f.get(ri as usize, rj as usize) {
            return Ok(*v);
        }
    }
    let i0 = (sx.floor().max(0.0) as usize).min(n.saturating_sub(1));
    let j0 = (sy.floor().max(0.0) as usize).min(n.saturating_sub(1));
    let (tx, ty) = (sx - i0 as f64, sy - j0 as f64);
    let start = |c: usize| c.saturating_sub(1).min(n.saturating_sub(3));
    let (si, sj) = (start(i0), start(j0));
    let full = (0..4).all(|a| (0..4).all(|b| f.get(si + a, sj + b).is_some()));
    if full && n >= 3 {
        let wx = lagrange4(sx - si as f64);
        let wy = lagrange4(sy - sj as f64);
        let mut v = V4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                v += f.at(si + a, sj + b) * (wx[a] * wy[b]);
            }
        }
        return Ok(v);
    }
    // Linear on the lower-left triangle of the cell, or bilinear when the
    // whole cell is available.
    let v00 = *f.at(i0, j0);
    let v10 = f.get(i0 + 1, j0).copied();
    let v01 = f.get(i0, j0 + 1).copied();
    let v11 = f.get(i0 + 1, j0 + 1).copied();
    match (v10, v01, v11) {
        (Some(a), Some(b), Some(c)) => Ok(v00 * ((1.0 - tx) * (1.0 - ty)) + a * (tx * (1.0 - ty)) + b * ((1.0 - tx) * ty) + c * (tx * ty)),
        (Some(a), Some(b), None) => Ok(v00 + (a - v00) * tx + (b - v00) * ty),
        _ => Ok(v00),
    }
}

fn lagrange4(t: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for (a, wa) in w.iter_mut().enumerate() {
        for b in 0..4 {
            if a != b {
                *wa *= (t - b as f64) / (a as f64 - b as f64);
            }
        }
    }
    w
}

/// `K_v` at the image nodes `(x, y) = ((i + j) h, (i - j) h)` of the
/// characteristic lattice, with the residual of `K_xx - K_yy = r K`.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    pub points: Vec<(f64, f64, V4)>,
    /// Sup over interior nodes of the finite-difference residual.
    pub residual: f64,
}

/// Transfers a solution on the standard frame to physical coordinates.
///
/// The residual uses the even sublattice (spacing `2h` in x and y), whose
/// second differences land exactly on lattice nodes:
/// `(K_xx - K_yy)(x, y) ≈ [k(i+1,j+1) + k(i-1,j-1) - k(i+1,j-1) - k(i-1,j+1)] / 4h²`,
/// and compares with `R k` there.
pub fn back_transform(sol: &GoursatSolution, r: &TriangleField<Matrix4<f64>>) -> PhysicalField {
    let k = &sol.k;
    let h = k.spacing();
    let points = k
        .nodes()
        .iter()
        .zip(&k.values)
        .map(|(p, v)| {
            let (x, y) = from_characteristic(p.x, p.y);
            (x, y, *v)
        })
        .collect();
    let residual = k
        .nodes()
        .par_iter()
        .filter(|p| p.i >= 1 && p.j >= 1)
        .filter_map(|p| {
            let (i, j) = (p.i, p.j);
            let pp = k.get(i + 1, j + 1)?;
            let mm = k.get(i - 1, j - 1)?;
            let pm = k.get(i + 1, j - 1)?;
            let mp = k.get(i - 1, j + 1)?;
            let lhs = (pp + mm - pm - mp) / (4.0 * h * h);
            Some((lhs - r.at(i, j) * k.at(i, j)).amax())
        })
        .reduce(|| 0.0, f64::max);
    PhysicalField { points, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> V4 {
        V4::new(1.0, 0.0, 0.0, 0.0)
    }

    // Σ x^m / (m!)^2 style series for I_ν(2√z) (z = XY) by direct summation.
    fn bessel_series(z: f64, nu: u32) -> f64 {
        let mut s = 0.0;
        for m in 0..60u32 {
            let mut term = z.powi(m as i32);
            for q in 1..=m {
                term /= q as f64;
            }
            for q in 1..=(m + nu) {
                term /= q as f64;
            }
            s += term;
        }
        s
    }

    #[test]
    fn characteristic_coordinates() {
        assert_eq!(to_characteristic(1.0, 1.0), (1.0, 0.0));
        assert_eq!(to_characteristic(1.0, -1.0), (0.0, 1.0));
        let (cx, cy) = to_characteristic(0.4, 0.1);
        let (x, y) = from_characteristic(cx, cy);
        assert!((x - 0.4).abs() < 1e-15 && (y - 0.1).abs() < 1e-15);
    }

    #[test]
    fn frames() {
        assert_eq!(CharFrame::standard().scale(), 1.0);
        let f = CharFrame::new((1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)).unwrap();
        assert_eq!(f.scale(), -1.0);
        assert_eq!(f.physical(1.0, 0.0), (0.0, 0.0));
        assert!(CharFrame::new((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)).is_err());
        let (dx, dy) = f.physical_gradient(V4::repeat(1.0), V4::zeros());
        // ∂_X = -∂x - ∂y, ∂_Y = ∂x - ∂y
        assert_eq!((dx[0], dy[0]), (-0.5, -0.5));
    }

    #[test]
    fn dalembert_examples() {
        let p = GoursatProblem::from_fn(GoursatConfig::TwoSides, 16, |_, _| Matrix4::zeros(), |s| e1() * s, |s| e1() * (s * s)).unwrap();
        let h = homogeneous_part(&p).unwrap();
        for (q, v) in h.k0.nodes().iter().zip(&h.k0.values) {
            assert!((v[0] - (q.x + q.y * q.y)).abs() < 1e-15);
        }
        let c = GoursatProblem::from_fn(GoursatConfig::TwoSides, 8, |_, _| Matrix4::zeros(), |_| V4::repeat(2.0), |_| V4::repeat(2.0)).unwrap();
        assert!(homogeneous_part(&c).unwrap().k0.values.iter().all(|v| *v == V4::repeat(2.0)));
        let p3 = GoursatProblem::from_fn(GoursatConfig::SideAndNormal, 16, |_, _| Matrix4::zeros(), |s| e1() * (s * s), |_| V4::zeros()).unwrap();
        let h3 = homogeneous_part(&p3).unwrap();
        for (q, v) in h3.k0.nodes().iter().zip(&h3.k0.values) {
            let want = q.x * q.x + (1.0 - q.y).powi(2) - 1.0;
            assert!((v[0] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn incompatible_corner_rejected() {
        let r = GoursatProblem::from_fn(GoursatConfig::TwoSides, 8, |_, _| Matrix4::zeros(), |_| e1(), |_| V4::zeros());
        assert!(matches!(r, Err(Error::Configuration(_))));
    }

    #[test]
    fn zero_rhs_needs_no_iteration() {
        for config in [GoursatConfig::TwoSides, GoursatConfig::CauchyOnAB, GoursatConfig::SideAndNormal] {
            let p = GoursatProblem::from_fn(config, 20, |_, _| Matrix4::zeros(), |s| e1() * (1.0 + s), |s| e1() * (1.0 + s)).unwrap();
            let sol = picard_solve(&p, PicardOptions::default()).unwrap();
            assert_eq!(sol.iterations, 0);
            assert_eq!(sol.k, sol.k0);
        }
    }

    #[test]
    fn bessel_problem() {
        let p = GoursatProblem::from_fn(GoursatConfig::TwoSides, 100, |_, _| Matrix4::identity(), |_| e1(), |_| e1()).unwrap();
        let sol = picard_solve(&p, PicardOptions::default()).unwrap();
        let oracle = bessel_series(1.0, 0);
        assert!((sol.value_at(1.0, 1.0).unwrap()[0] - oracle).abs() < 1e-8);
        assert!((oracle - 2.27958530233607).abs() < 1e-13);
        let d = sol.k_x.at(100, 100)[0];
        assert!((d - bessel_series(1.0, 1)).abs() < 1e-8);
        let b = sol.bounds();
        assert_eq!(b.m, 1.0);
        assert!(b.c0_ok && b.c2_ok && b.picard_ok == Some(true), "{b:?}");
        // Mixed derivative equals R k pointwise.
        assert!(sol.k_xy.values.iter().zip(&sol.k.values).all(|(a, b)| (a - b).amax() < 1e-15));
    }

    #[test]
    fn prop2_homogeneous_data_give_zero() {
        let p = GoursatProblem::from_fn(GoursatConfig::CauchyOnAB, 20, |x, y| Matrix4::identity() * (1.0 + x * y), |_| V4::zeros(), |_| V4::zeros()).unwrap();
        let sol = picard_solve(&p, PicardOptions::default()).unwrap();
        assert!(sup(&sol.k) == 0.0);
    }

    #[test]
    fn boundary_data_reproduced() {
        let r = |x: f64, y: f64| Matrix4::from_fn(|a, b| 0.1 * ((a + 2 * b) as f64 * 0.3 + x - y).cos());
        let f = |s: f64| V4::new(s.sin(), 1.0 + s * s, (2.0 * s).cos(), s);
        let g = |s: f64| V4::new(0.3 * s, s.exp(), -s, 0.5);

        let p2 = GoursatProblem::from_fn(GoursatConfig::CauchyOnAB, 80, r, f, g).unwrap();
        let s2 = picard_solve(&p2, PicardOptions::default()).unwrap();
        for i in 0..=80 {
            assert!((s2.k.at(i, 80 - i) - p2.f[i]).amax() < 1e-9);
            let normal = (s2.k_x.at(80 - i, i) + s2.k_y.at(80 - i, i)) / SQRT_2;
            assert!((normal - p2.g[i]).amax() < 1e-9);
        }

        let p3 = GoursatProblem::from_fn(GoursatConfig::SideAndNormal, 80, r, f, g).unwrap();
        let s3 = picard_solve(&p3, PicardOptions::default()).unwrap();
        for i in 0..=80 {
            assert!((s3.k.at(i, 0) - p3.f[i]).amax() < 1e-9);
            let normal = (s3.k_x.at(80 - i, i) + s3.k_y.at(80 - i, i)) / SQRT_2;
            assert!((normal - p3.g[i]).amax() < 1e-9);
        }
    }
}
