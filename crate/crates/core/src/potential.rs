//! Matrix potentials and vector initial values, given either in closed form
//! or by samples.
//!
//! The closed-form grammar is a signed sum of terms `c`, `c*x^k`,
//! `c*cos(m*pi*x)`, `c*sin(m*pi*x)` and `c*exp(b*x)`; factors may appear in
//! any order and a missing coefficient means 1.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::field::{cumulative_integral, interpolate, Grid1D, VectorValuedField};

/// One term of a closed-form expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Power { c: f64, k: u32 },
    Cos { c: f64, m: i64 },
    Sin { c: f64, m: i64 },
    Exp { c: f64, b: f64 },
}

impl Term {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Term::Power { c, k } => c * x.powi(k as i32),
            Term::Cos { c, m } => c * (m as f64 * std::f64::consts::PI * x).cos(),
            Term::Sin { c, m } => c * (m as f64 * std::f64::consts::PI * x).sin(),
            Term::Exp { c, b } => c * (b * x).exp(),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match *self {
            Term::Power { k: 0, .. } => 0.0,
            Term::Power { c, k } => c * k as f64 * x.powi(k as i32 - 1),
            Term::Cos { c, m } => -c * m as f64 * pi * (m as f64 * pi * x).sin(),
            Term::Sin { c, m } => c * m as f64 * pi * (m as f64 * pi * x).cos(),
            Term::Exp { c, b } => c * b * (b * x).exp(),
        }
    }

    // Antiderivative vanishing at 0.
    fn integral(&self, x: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match *self {
            Term::Power { c, k } => c * x.powi(k as i32 + 1) / (k as f64 + 1.0),
            Term::Cos { c, m: 0 } => c * x,
            Term::Cos { c, m } => {
                let w = m as f64 * pi;
                c * (w * x).sin() / w
            }
            Term::Sin { m: 0, .. } => 0.0,
            Term::Sin { c, m } => {
                let w = m as f64 * pi;
                c * (1.0 - (w * x).cos()) / w
            }
            Term::Exp { c, b } if b == 0.0 => c * x,
            Term::Exp { c, b } => c * (b * x).exp_m1() / b,
        }
    }

    fn constant(&self) -> Option<f64> {
        match *self {
            Term::Power { c, k: 0 } => Some(c),
            Term::Cos { c, m: 0 } => Some(c),
            Term::Sin { m: 0, .. } => Some(0.0),
            Term::Exp { c, b } if b == 0.0 => Some(c),
            _ if self.coefficient() == 0.0 => Some(0.0),
            _ => None,
        }
    }

    fn coefficient(&self) -> f64 {
        match *self {
            Term::Power { c, .. } | Term::Cos { c, .. } | Term::Sin { c, .. } | Term::Exp { c, .. } => c,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Term::Power { c, k: 0 } => write!(f, "{c:?}"),
            Term::Power { c, k } => write!(f, "{c:?}*x^{k}"),
            Term::Cos { c, m } => write!(f, "{c:?}*cos({m}*pi*x)"),
            Term::Sin { c, m } => write!(f, "{c:?}*sin({m}*pi*x)"),
            Term::Exp { c, b } => write!(f, "{c:?}*exp({b:?}*x)"),
        }
    }
}

/// A finite sum of closed-form terms in `x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr {
            terms: vec![Term::Power { c, k: 0 }],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.derivative(x)).sum()
    }

    /// `∫_0^x` of the expression.
    pub fn integral(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.integral(x)).sum()
    }

    /// The value if the expression does not depend on `x`.
    pub fn as_constant(&self) -> Option<f64> {
        self.terms.iter().map(Term::constant).sum()
    }

    pub fn plus_constant(&self, c: f64) -> Self {
        let mut e = self.clone();
        e.terms.push(Term::Power { c, k: 0 });
        e
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coefficient().is_sign_negative();
            match (i, negative) {
                (0, _) => write!(f, "{t}")?,
                (_, false) => write!(f, " + {t}")?,
                (_, true) => write!(f, " - {}", scale(*t, -1.0))?,
            }
        }
        Ok(())
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let terms = split_terms(&compact)?
            .into_iter()
            .map(|(sign, body)| parse_term(body).map(|t| scale(t, sign)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{m} in '{s}'")),
                other => other,
            })?;
        Ok(Expr { terms })
    }
}

fn scale(t: Term, s: f64) -> Term {
    match t {
        Term::Power { c, k } => Term::Power { c: s * c, k },
        Term::Cos { c, m } => Term::Cos { c: s * c, m },
        Term::Sin { c, m } => Term::Sin { c: s * c, m },
        Term::Exp { c, b } => Term::Exp { c: s * c, b },
    }
}

// Splits at top-level '+'/'-' that are not part of a number exponent.
fn split_terms(s: &str) -> Result<Vec<(f64, &str)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = 1.0;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                let exponent = i > 0
                    && matches!(bytes[i - 1], b'e' | b'E')
                    && i > 1
                    && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
                let operator_prefix = i > 0 && matches!(bytes[i - 1], b'*' | b'^');
                if exponent || operator_prefix {
                    continue;
                }
                let s_op = if b == b'-' { -1.0 } else { 1.0 };
                if i > start {
                    out.push((sign, &s[start..i]));
                    sign = s_op;
                } else {
                    // leading sign or a sign directly after another one
                    sign *= s_op;
                }
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse("unbalanced parentheses".into()));
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    if start >= s.len() {
        return Err(Error::Parse("expression ends with an operator".into()));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

fn split_factors(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_number(s: &str) -> Result<f64> {
    if s.eq_ignore_ascii_case("pi") {
        return Ok(std::f64::consts::PI);
    }
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("cannot read '{s}' as a number")))
}

fn parse_term(body: &str) -> Result<Term> {
    let mut c = 1.0;
    let mut shape: Option<Term> = None;
    for factor in split_factors(body) {
        if factor.is_empty() {
            return Err(Error::Parse("empty factor".into()));
        }
        let lower = factor.to_ascii_lowercase();
        let candidate = if lower == "x" {
            Some(Term::Power { c: 1.0, k: 1 })
        } else if let Some(k) = lower.strip_prefix("x^") {
            let k: u32 = k
                .parse()
                .map_err(|_| Error::Parse(format!("power '{factor}' needs a non-negative integer exponent")))?;
            Some(Term::Power { c: 1.0, k })
        } else if let Some(arg) = function_arg(&lower, "cos") {
            Some(Term::Cos { c: 1.0, m: trig_multiple(arg)? })
        } else if let Some(arg) = function_arg(&lower, "sin") {
            Some(Term::Sin { c: 1.0, m: trig_multiple(arg)? })
        } else if let Some(arg) = function_arg(&lower, "exp") {
            Some(Term::Exp { c: 1.0, b: exp_rate(arg)? })
        } else {
            c *= parse_number(factor)?;
            None
        };
        if let Some(t) = candidate {
            if shape.is_some() {
                return Err(Error::Parse(format!("term '{body}' has more than one x-dependent factor")));
            }
            shape = Some(t);
        }
    }
    Ok(scale(shape.unwrap_or(Term::Power { c: 1.0, k: 0 }), c))
}

fn function_arg<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

// Argument of the form m*pi*x (any factor order); returns the integer m.
fn trig_multiple(arg: &str) -> Result<i64> {
    let mut m = 1.0;
    let (mut saw_pi, mut saw_x) = (false, false);
    for f in split_factors(arg) {
        match f {
            "pi" if !saw_pi => saw_pi = true,
            "x" if !saw_x => saw_x = true,
            _ => m *= parse_number(f)?,
        }
    }
    if !(saw_pi && saw_x) {
        return Err(Error::Parse(format!("trigonometric argument '{arg}' must be m*pi*x")));
    }
    if (m - m.round()).abs() > 1e-12 {
        return Err(Error::Parse(format!("trigonometric multiple {m} is not an integer")));
    }
    Ok(m.round() as i64)
}

fn exp_rate(arg: &str) -> Result<f64> {
    let mut b = 1.0;
    let mut saw_x = false;
    for f in split_factors(arg) {
        if f == "x" && !saw_x {
            saw_x = true;
        } else {
            b *= parse_number(f)?;
        }
    }
    if !saw_x {
        return Err(Error::Parse(format!("exponential argument '{arg}' must be b*x")));
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Closed { p11: Expr, p12: Expr, p22: Expr },
    Sampled { grid: Grid1D, p11: Vec<f64>, p12: Vec<f64>, p22: Vec<f64> },
}

/// A symmetric 2x2 matrix function on `[0, L]`, `L` being 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPotential {
    repr: Repr,
    hi: f64,
}

impl MatrixPotential {
    pub fn closed_form(p11: Expr, p12: Expr, p22: Expr) -> Self {
        Self {
            repr: Repr::Closed { p11, p12, p22 },
            hi: 1.0,
        }
    }

    /// Parses entry strings; `p21`, when given, must describe the same
    /// function as `p12`.
    pub fn parse(p11: &str, p12: &str, p21: Option<&str>, p22: &str) -> Result<Self> {
        let e12: Expr = p12.parse()?;
        if let Some(p21) = p21 {
            let e21: Expr = p21.parse()?;
            let probe = Grid1D::new(0.0, 1.0, 41)?;
            if probe
                .points()
                .iter()
                .any(|&x| (e12.eval(x) - e21.eval(x)).abs() > 1e-14 * (1.0 + e12.eval(x).abs()))
            {
                return Err(Error::Domain(format!(
                    "potential is not symmetric: p12 = '{p12}' but p21 = '{p21}'"
                )));
            }
        }
        Ok(Self::closed_form(p11.parse()?, e12, p22.parse()?))
    }

    /// Constant matrix potential; the off-diagonal entries must agree.
    pub fn constant(m: Matrix2<f64>) -> Result<Self> {
        check_symmetric(&m, 0.0)?;
        Ok(Self::closed_form(
            Expr::constant(m[(0, 0)]),
            Expr::constant(m[(0, 1)]),
            Expr::constant(m[(1, 1)]),
        ))
    }

    pub fn diagonal(d1: f64, d2: f64) -> Self {
        Self::closed_form(Expr::constant(d1), Expr::default(), Expr::constant(d2))
    }

    pub fn zero() -> Self {
        Self::diagonal(0.0, 0.0)
    }

    /// Sampled potential from the three independent entries.
    pub fn sampled(grid: Grid1D, p11: Vec<f64>, p12: Vec<f64>, p22: Vec<f64>) -> Result<Self> {
        for (name, v) in [("p11", &p11), ("p12", &p12), ("p22", &p22)] {
            if v.len() != grid.len() {
                return Err(Error::Domain(format!(
                    "{name} has {} samples for a grid of {} points",
                    v.len(),
                    grid.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("{name} contains non-finite samples")));
            }
        }
        let hi = grid.hi();
        if grid.lo() != 0.0 || !(hi == 1.0 || hi == 2.0) {
            return Err(Error::Domain(format!(
                "sampled potential must live on [0, 1] or [0, 2], got [{}, {hi}]",
                grid.lo()
            )));
        }
        if grid.len() < 5 {
            return Err(Error::Domain("sampled potential needs at least 5 points".into()));
        }
        Ok(Self {
            repr: Repr::Sampled { grid, p11, p12, p22 },
            hi,
        })
    }

    /// Sampled potential from full matrices, rejecting asymmetric samples.
    pub fn from_matrices(grid: Grid1D, m: &[Matrix2<f64>]) -> Result<Self> {
        for a in m {
            check_symmetric(a, 1e-14)?;
        }
        Self::sampled(
            grid,
            m.iter().map(|a| a[(0, 0)]).collect(),
            m.iter().map(|a| a[(0, 1)]).collect(),
            m.iter().map(|a| a[(1, 1)]).collect(),
        )
    }

    /// Right end of the domain.
    pub fn domain_end(&self) -> f64 {
        self.hi
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.repr, Repr::Closed { .. })
    }

    /// Entry expressions of a closed-form potential.
    pub fn expressions(&self) -> Option<(&Expr, &Expr, &Expr)> {
        match &self.repr {
            Repr::Closed { p11, p12, p22 } => Some((p11, p12, p22)),
            Repr::Sampled { .. } => None,
        }
    }

    /// Samples of a sampled potential.
    pub fn samples(&self) -> Option<(&Grid1D, &[f64], &[f64], &[f64])> {
        match &self.repr {
            Repr::Sampled { grid, p11, p12, p22 } => Some((grid, p11, p12, p22)),
            Repr::Closed { .. } => None,
        }
    }

    /// Value at `x`; sampled potentials are interpolated cubically.
    pub fn eval(&self, x: f64) -> Result<Matrix2<f64>> {
        if !(x >= -1e-12 && x <= self.hi + 1e-12) {
            return Err(Error::Domain(format!(
                "potential evaluated at {x} outside [0, {}]",
                self.hi
            )));
        }
        Ok(match &self.repr {
            Repr::Closed { p11, p12, p22 } => sym(p11.eval(x), p12.eval(x), p22.eval(x)),
            Repr::Sampled { grid, p11, p12, p22 } => sym(
                interpolate(grid, p11, x)?,
                interpolate(grid, p12, x)?,
                interpolate(grid, p22, x)?,
            ),
        })
    }

    /// Samples on every node of `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<Matrix2<f64>>> {
        grid.points().iter().map(|&x| self.eval(x)).collect()
    }

    /// `∫_0^x P` at every node of `grid` (exact for closed forms).
    pub fn integral_on(&self, grid: &Grid1D) -> Result<Vec<Matrix2<f64>>> {
        match &self.repr {
            Repr::Closed { p11, p12, p22 } => Ok(grid
                .sample(|x| sym(p11.integral(x), p12.integral(x), p22.integral(x)))),
            Repr::Sampled { .. } => {
                // Integrate the interpolant on a grid at least as fine as the samples.
                let vals = self.sample(grid)?;
                Ok(cumulative_integral(&vals, grid.spacing()))
            }
        }
    }

    /// The constant value, when the potential does not depend on `x`.
    pub fn as_constant(&self) -> Option<Matrix2<f64>> {
        match &self.repr {
            Repr::Closed { p11, p12, p22 } => {
                Some(sym(p11.as_constant()?, p12.as_constant()?, p22.as_constant()?))
            }
            Repr::Sampled { p11, p12, p22, .. } => {
                let same = |v: &[f64]| v.iter().all(|a| (a - v[0]).abs() <= 1e-15 * (1.0 + v[0].abs()));
                (same(p11) && same(p12) && same(p22)).then(|| sym(p11[0], p12[0], p22[0]))
            }
        }
    }

    /// `P + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Repr::Closed { p11, p12, p22 } => Repr::Closed {
                p11: p11.plus_constant(c),
                p12: p12.clone(),
                p22: p22.plus_constant(c),
            },
            Repr::Sampled { grid, p11, p12, p22 } => Repr::Sampled {
                grid: grid.clone(),
                p11: p11.iter().map(|v| v + c).collect(),
                p12: p12.clone(),
                p22: p22.iter().map(|v| v + c).collect(),
            },
        };
        Self { repr, hi: self.hi }
    }

    /// Smallest and largest eigenvalue of `P(x)` over the nodes of `grid`.
    pub fn eigen_range(&self, grid: &Grid1D) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in self.sample(grid)? {
            let (a, b) = sym_eigenvalues(&m);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        Ok((lo, hi))
    }

    /// C¹ extension to `[0, 2]`.
    ///
    /// Closed forms are evaluated beyond 1 by their formula. Sampled data are
    /// continued by point reflection `Q(x) = 2 Q(1) - Q(2 - x)`, which keeps
    /// value and slope continuous at 1 and leaves `[0, 1]` untouched.
    pub fn extend(&self) -> Self {
        if self.hi >= 2.0 {
            return self.clone();
        }
        match &self.repr {
            Repr::Closed { .. } => Self {
                repr: self.repr.clone(),
                hi: 2.0,
            },
            Repr::Sampled { grid, p11, p12, p22 } => {
                let n = grid.len();
                let wide = Grid1D::new(0.0, 2.0, 2 * n - 1).expect("valid extension grid");
                let reflect = |v: &[f64]| {
                    let mut out = v.to_vec();
                    let end = v[n - 1];
                    out.extend((1..n).map(|k| 2.0 * end - v[n - 1 - k]));
                    out
                };
                Self {
                    repr: Repr::Sampled {
                        grid: wide,
                        p11: reflect(p11),
                        p12: reflect(p12),
                        p22: reflect(p22),
                    },
                    hi: 2.0,
                }
            }
        }
    }
}

fn sym(a: f64, b: f64, c: f64) -> Matrix2<f64> {
    Matrix2::new(a, b, b, c)
}

fn check_symmetric(m: &Matrix2<f64>, tol: f64) -> Result<()> {
    let (a, b) = (m[(0, 1)], m[(1, 0)]);
    if (a - b).abs() > tol * (1.0 + a.abs()) {
        return Err(Error::Domain(format!(
            "potential is not symmetric: p12 = {a} but p21 = {b}"
        )));
    }
    Ok(())
}

/// Eigenvalues `(min, max)` of a symmetric 2x2 matrix.
pub fn sym_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = half.hypot(0.5 * (m[(0, 1)] + m[(1, 0)]));
    (mean - r, mean + r)
}

/// An initial value `a(x)` in closed form or sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSpec {
    Closed { a1: Expr, a2: Expr },
    Sampled(VectorValuedField),
}

impl VectorSpec {
    pub fn parse(a1: &str, a2: &str) -> Result<Self> {
        Ok(VectorSpec::Closed {
            a1: a1.parse()?,
            a2: a2.parse()?,
        })
    }

    pub fn constant(a1: f64, a2: f64) -> Self {
        VectorSpec::Closed {
            a1: Expr::constant(a1),
            a2: Expr::constant(a2),
        }
    }

    /// Samples on `grid` (cubic interpolation for sampled data).
    pub fn sample(&self, grid: &Grid1D) -> Result<VectorValuedField> {
        match self {
            VectorSpec::Closed { a1, a2 } => {
                VectorValuedField::new(grid.clone(), grid.sample(|x| Vector2::new(a1.eval(x), a2.eval(x))))
            }
            VectorSpec::Sampled(f) => f.resample(grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_all_term_kinds() {
        let e: Expr = "1 + 0.5*cos(pi*x) - 2*x^2 + 3*sin(2*pi*x) + 0.1*exp(-1.5*x)".parse().unwrap();
        let x = 0.3;
        let want = 1.0 + 0.5 * (PI * x).cos() - 2.0 * x * x + 3.0 * (2.0 * PI * x).sin() + 0.1 * (-1.5 * x).exp();
        assert!((e.eval(x) - want).abs() < 1e-14);
    }

    #[test]
    fn scientific_notation_and_implicit_coefficients() {
        let e: Expr = "1e-12 + x - cos(3*pi*x)".parse().unwrap();
        assert!((e.eval(0.0) - (1e-12 - 1.0)).abs() < 1e-15);
        let e: Expr = "-2.5e+1*x".parse().unwrap();
        assert_eq!(e.eval(1.0), -25.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("cos(x)".parse::<Expr>(), Err(Error::Parse(_))));
        assert!(matches!("x^1.5".parse::<Expr>(), Err(Error::Parse(_))));
        assert!(matches!("1 +".parse::<Expr>(), Err(Error::Parse(_))));
        assert!(matches!("log(x)".parse::<Expr>(), Err(Error::Parse(_))));
        assert!(matches!("cos(0.5*pi*x)".parse::<Expr>(), Err(Error::Parse(_))));
    }

    #[test]
    fn display_round_trips() {
        let e: Expr = "1 - 0.2*x^3 + 0.1*sin(2*pi*x) + exp(0.5*x)".parse().unwrap();
        let back: Expr = e.to_string().parse().unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn derivative_and_integral_match_numerics() {
        let e: Expr = "0.3 + x^2 - 0.4*cos(pi*x) + 0.2*sin(3*pi*x) + exp(2*x)".parse().unwrap();
        let x = 0.41;
        let h = 1e-5;
        let fd = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
        assert!((fd - e.derivative(x)).abs() < 1e-7);
        let g = Grid1D::new(0.0, x, 2001).unwrap();
        let f = g.sample(|s| e.eval(s));
        let q = crate::field::integrate(&g, &f, 0.0, x).unwrap();
        assert!((q - e.integral(x)).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_entries_rejected() {
        assert!(matches!(
            MatrixPotential::parse("1", "0.3", Some("0.2"), "2"),
            Err(Error::Domain(_))
        ));
        assert!(MatrixPotential::parse("1", "0.3", Some("0.3"), "2").is_ok());
    }

    #[test]
    fn constant_detection() {
        let p = MatrixPotential::parse("1", "0.3", None, "2 + 0*x").unwrap();
        assert_eq!(p.as_constant(), Some(Matrix2::new(1.0, 0.3, 0.3, 2.0)));
        let q = MatrixPotential::parse("1 + x", "0", None, "2").unwrap();
        assert_eq!(q.as_constant(), None);
    }

    #[test]
    fn extension_of_constant_and_cosine() {
        let c = MatrixPotential::diagonal(3.0, 3.0).extend();
        assert_eq!(c.eval(1.7).unwrap(), Matrix2::new(3.0, 0.0, 0.0, 3.0));
        let q = MatrixPotential::parse("cos(pi*x)", "cos(pi*x)", None, "cos(pi*x)").unwrap().extend();
        assert!((q.eval(1.5).unwrap()[(0, 0)] - (1.5 * PI).cos()).abs() < 1e-15);
    }

    #[test]
    fn sampled_extension_is_c1_at_one() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let x = g.sample(|x| x);
        let p = MatrixPotential::sampled(g.clone(), x.clone(), x.clone(), x).unwrap().extend();
        let (wide, p11, _, _) = p.samples().unwrap();
        let h = wide.spacing();
        let mid = 100;
        assert!((p11[mid] - 1.0).abs() < 1e-8);
        let left = (p11[mid] - p11[mid - 1]) / h;
        let right = (p11[mid + 1] - p11[mid]) / h;
        assert!((left - right).abs() < 1e-8);
        assert!((p.eval(1.37).unwrap()[(0, 0)] - 1.37).abs() < 1e-12);
    }

    #[test]
    fn eigen_range_of_coupled_constant() {
        let p = MatrixPotential::parse("1", "0.3", None, "1").unwrap();
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        let (lo, hi) = p.eigen_range(&g).unwrap();
        assert!((lo - 0.7).abs() < 1e-15 && (hi - 1.3).abs() < 1e-15);
    }
}
