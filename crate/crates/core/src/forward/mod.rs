//! Solutions of `u_t = u_xx - P(x) u` with Neumann conditions, by truncated
//! eigenfunction expansion, and their boundary traces.

mod fd;

pub use fd::{fd_oracle_solve, FdOptions};

use std::str::FromStr;

use nalgebra::Vector2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::VectorValuedField;
use crate::spectral::SpectrumTable;

/// Default number of modes in an expansion.
pub const DEFAULT_MODES: usize = 12;

/// Sample times on `(t_min, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Domain("empty time grid".into()));
        }
        if times[0] <= 0.0 || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::Domain("trace times must be finite and positive".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("trace times must increase strictly".into()));
        }
        Ok(Self { times })
    }

    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        check_window(t_min, t_max, n)?;
        if n == 1 {
            return Self::new(vec![t_min]);
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let mut times: Vec<f64> = (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect();
        times[0] = t_min;
        times[n - 1] = t_max;
        Self::new(times)
    }

    pub fn linear(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        check_window(t_min, t_max, n)?;
        if n == 1 {
            return Self::new(vec![t_min]);
        }
        let mut times: Vec<f64> = (0..n)
            .map(|k| t_min + (t_max - t_min) * k as f64 / (n - 1) as f64)
            .collect();
        times[n - 1] = t_max;
        Self::new(times)
    }

    /// The default window: 600 log-spaced samples on `[0.01, 3]`.
    pub fn default_window() -> Self {
        Self::log_spaced(0.01, 3.0, 600).expect("static window")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_window(t_min: f64, t_max: f64, n: usize) -> Result<()> {
    if n == 0 || !(t_min > 0.0) || !(t_max >= t_min) || !t_max.is_finite() {
        return Err(Error::Domain(format!(
            "invalid time window [{t_min}, {t_max}] with {n} samples"
        )));
    }
    Ok(())
}

/// Parses `a:b:Nlog` (log-spaced) or `a:b:N` (uniform).
impl FromStr for TimeGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("time spec '{s}' is not of the form a:b:N[log]")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{p}' in time spec '{s}'")))
        };
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let count = parts[2].trim();
        let (digits, log) = match count.strip_suffix("log") {
            Some(d) => (d, true),
            None => (count, false),
        };
        let n: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad sample count '{count}' in time spec '{s}'")))?;
        if log {
            TimeGrid::log_spaced(a, b, n)
        } else {
            TimeGrid::linear(a, b, n)
        }
    }
}

/// Values of a solution at `x = 0` and `x = 1` over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub times: Vec<f64>,
    pub left: Vec<Vector2<f64>>,
    pub right: Vec<Vector2<f64>>,
}

impl BoundaryTrace {
    pub fn new(times: Vec<f64>, left: Vec<Vector2<f64>>, right: Vec<Vector2<f64>>) -> Result<Self> {
        TimeGrid::new(times.clone())?;
        if left.len() != times.len() || right.len() != times.len() {
            return Err(Error::Domain("trace arrays differ in length from the time grid".into()));
        }
        if left.iter().chain(&right).any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::Domain("trace contains non-finite values".into()));
        }
        Ok(Self { times, left, right })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The four scalar channels `(u1(0), u2(0), u1(1), u2(1))` at sample `k`.
    pub fn channels(&self, k: usize) -> [f64; 4] {
        [self.left[k][0], self.left[k][1], self.right[k][0], self.right[k][1]]
    }

    /// Largest entrywise difference to another trace on the same times.
    pub fn sup_distance(&self, other: &BoundaryTrace) -> Result<f64> {
        self.same_times(other)?;
        Ok((0..self.len())
            .map(|k| {
                (self.left[k] - other.left[k])
                    .amax()
                    .max((self.right[k] - other.right[k]).amax())
            })
            .fold(0.0, f64::max))
    }

    /// `L²` norm over the window of all four channels (trapezoid in t).
    pub fn l2_norm(&self) -> f64 {
        self.l2_of(|k| self.channels(k))
    }

    /// `L²` distance to another trace on the same times.
    pub fn l2_distance(&self, other: &BoundaryTrace) -> Result<f64> {
        self.same_times(other)?;
        Ok(self.l2_of(|k| {
            let (a, b) = (self.channels(k), other.channels(k));
            [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
        }))
    }

    fn l2_of(&self, f: impl Fn(usize) -> [f64; 4]) -> f64 {
        let sq = |k: usize| f(k).iter().map(|v| v * v).sum::<f64>();
        let mut acc = 0.0;
        for k in 0..self.len().saturating_sub(1) {
            acc += 0.5 * (self.times[k + 1] - self.times[k]) * (sq(k) + sq(k + 1));
        }
        acc.sqrt()
    }

    fn same_times(&self, other: &BoundaryTrace) -> Result<()> {
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(a, b)| (a - b).abs() > 1e-14 * a.abs())
        {
            return Err(Error::Domain("traces sampled on different time grids".into()));
        }
        Ok(())
    }
}

/// Truncated expansion `u(x, t) = Σ e^{-λ_n t} c_n ψ_n(x)`.
#[derive(Debug, Clone)]
pub struct ExpansionSolution {
    pub table: SpectrumTable,
    pub initial: VectorValuedField,
    /// `c_n = (a, ψ_n) / ρ_n`.
    pub coefficients: Vec<f64>,
}

/// Modal coefficients of `a` against the table.
pub fn expand_initial(table: &SpectrumTable, a: &VectorValuedField) -> Result<ExpansionSolution> {
    let a = a.resample(table.problem.grid())?;
    let coefficients = table
        .pairs
        .iter()
        .map(|p| Ok(a.inner(&p.eigenfunction)? / p.rho))
        .collect::<Result<Vec<_>>>()?;
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite expansion coefficient".into()));
    }
    Ok(ExpansionSolution {
        table: table.clone(),
        initial: a,
        coefficients,
    })
}

/// A pointwise value with a bound on the discarded modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Vector2<f64>,
    pub tail_bound: f64,
}

impl ExpansionSolution {
    pub fn modes(&self) -> usize {
        self.coefficients.len()
    }

    /// `u(x, t)` for `0 <= x <= 1`, `t > 0`.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<Vector2<f64>> {
        Ok(self.evaluate_with_bound(x, t)?.value)
    }

    /// `u(x, t)` together with a tail estimate.
    ///
    /// With `|c_n ψ_n(x)| <= ‖a‖ |ψ_n(x)| / sqrt(ρ_n)` and gaps above `N`
    /// taken equal to the mean computed gap `g`, the discarded modes are
    /// bounded by `‖a‖ B e^{-λ_N t} / (e^{g t} - 1)`, `B` being the largest
    /// computed `|ψ_n(x)| / sqrt(ρ_n)`.
    pub fn evaluate_with_bound(&self, x: f64, t: f64) -> Result<Evaluation> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "expansion evaluated at t = {t}; only t > 0 is supported"
            )));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        let mut value = Vector2::zeros();
        let mut b: f64 = 0.0;
        for (p, c) in self.table.pairs.iter().zip(&self.coefficients) {
            let psi = if x == 0.0 {
                p.endpoint0
            } else if x == 1.0 {
                p.endpoint1
            } else {
                p.eigenfunction.at(x)?
            };
            value += psi * (c * (-p.lambda * t).exp());
            b = b.max(psi.norm() / p.rho.sqrt());
        }
        let lambdas = self.table.lambdas();
        let n = lambdas.len();
        let gap = if n > 1 {
            (lambdas[n - 1] - lambdas[0]) / (n - 1) as f64
        } else {
            std::f64::consts::PI * std::f64::consts::PI
        };
        let tail_bound = self.initial.norm() * b * (-lambdas[n - 1] * t).exp() / (gap * t).exp_m1();
        Ok(Evaluation { value, tail_bound })
    }

    /// Sampled snapshot `u(·, t)` on the table grid.
    pub fn snapshot(&self, t: f64) -> Result<VectorValuedField> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("snapshot at t = {t}; only t > 0 is supported")));
        }
        let grid = self.table.problem.grid().clone();
        let mut values = vec![Vector2::zeros(); grid.len()];
        for (p, c) in self.table.pairs.iter().zip(&self.coefficients) {
            let w = c * (-p.lambda * t).exp();
            for (v, psi) in values.iter_mut().zip(&p.eigenfunction.values) {
                *v += psi * w;
            }
        }
        VectorValuedField::new(grid, values)
    }
}

/// `u(0, t)` and `u(1, t)` on every time of the grid.
pub fn boundary_traces(sol: &ExpansionSolution, times: &TimeGrid) -> Result<BoundaryTrace> {
    let rows = times
        .times()
        .par_iter()
        .map(|&t| Ok((sol.evaluate(0.0, t)?, sol.evaluate(1.0, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let (left, right) = rows.into_iter().unzip();
    BoundaryTrace::new(times.times().to_vec(), left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid1D;
    use crate::potential::MatrixPotential;
    use crate::spectral::{find_spectrum, SpectralProblem};
    use std::f64::consts::PI;

    fn diag_table(n: usize) -> SpectrumTable {
        let p = SpectralProblem::with_default_grid(MatrixPotential::diagonal(1.0, 2.0)).unwrap();
        find_spectrum(&p, n).unwrap()
    }

    fn field(f: impl Fn(f64) -> Vector2<f64>) -> VectorValuedField {
        VectorValuedField::from_fn(Grid1D::unit_default(), f)
    }

    #[test]
    fn time_spec_parsing() {
        let g: TimeGrid = "0.01:3:600log".parse().unwrap();
        assert_eq!(g.len(), 600);
        assert_eq!(g.times()[0], 0.01);
        assert_eq!(g.times()[599], 3.0);
        let l: TimeGrid = "0.1:1:10".parse().unwrap();
        assert!((l.times()[1] - 0.2).abs() < 1e-15);
        assert!("0:1:10".parse::<TimeGrid>().is_err());
        assert!(matches!("1:2".parse::<TimeGrid>(), Err(Error::Parse(_))));
    }

    #[test]
    fn constant_initial_value() {
        let t = diag_table(6);
        let sol = expand_initial(&t, &field(|_| Vector2::new(1.0, 1.0))).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-9);
        assert!((sol.coefficients[1] - 1.0).abs() < 1e-9);
        assert!(sol.coefficients[2..].iter().all(|c| c.abs() < 1e-9));
        for (x, tt) in [(0.0, 0.3), (0.37, 1.0), (1.0, 2.5)] {
            let u = sol.evaluate(x, tt).unwrap();
            assert!((u - Vector2::new((-tt).exp(), (-2.0 * tt).exp())).amax() < 1e-9);
        }
        let tr = boundary_traces(&sol, &TimeGrid::log_spaced(0.01, 3.0, 50).unwrap()).unwrap();
        assert!(tr.sup_distance(&BoundaryTrace::new(tr.times.clone(), tr.right.clone(), tr.left.clone()).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn eigenfunction_initial_values() {
        let t = diag_table(6);
        let sol = expand_initial(&t, &t.pairs[2].eigenfunction).unwrap();
        for (n, c) in sol.coefficients.iter().enumerate() {
            let want = if n == 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-8);
        }
        let sol = expand_initial(&t, &field(|x| Vector2::new((PI * x).cos(), 0.0))).unwrap();
        let u = sol.evaluate(0.0, 0.5).unwrap();
        assert!((u[0] - (-(PI * PI + 1.0) * 0.5).exp()).abs() < 1e-8 && u[1].abs() < 1e-8);
    }

    #[test]
    fn zero_time_rejected() {
        let t = diag_table(2);
        let sol = expand_initial(&t, &field(|_| Vector2::new(1.0, 0.0))).unwrap();
        assert!(matches!(sol.evaluate(0.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_bound_is_small_at_late_times() {
        let t = diag_table(12);
        let sol = expand_initial(&t, &field(|x| Vector2::new(1.0 + x, 1.0 - x))).unwrap();
        let e = sol.evaluate_with_bound(0.0, 1.0).unwrap();
        assert!(e.tail_bound < 1e-50);
        let early = sol.evaluate_with_bound(0.0, 0.01).unwrap();
        assert!(early.tail_bound > e.tail_bound);
    }
}
