use std::ops::{Add, Mul};

use super::{interpolation_stencil, Grid1D};
use crate::error::{Error, Result};

/// Composite Simpson weights for `n_points` equally spaced samples.
///
/// An odd number of intervals is closed with the 3/8 rule on the last three
/// intervals, so the rule stays fourth order; a single interval falls back
/// to the trapezoid rule.
pub fn simpson_weights(n_points: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n_points];
    if n_points < 2 {
        return w;
    }
    let intervals = n_points - 1;
    if intervals == 1 {
        w[0] = 0.5 * h;
        w[1] = 0.5 * h;
        return w;
    }
    let simpson_intervals = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    for k in (0..simpson_intervals).step_by(2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    if intervals % 2 == 1 {
        let s = simpson_intervals;
        let c = 3.0 * h / 8.0;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    w
}

/// Weights of the composite rule that integrates, on every interval, the
/// cubic through the four nearest samples (shifted inward at the ends).
///
/// Same order as Simpson but free of the even/odd alternation, which matters
/// when the integral is later differentiated numerically.
pub fn interval_rule_weights(n_points: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n_points];
    for i in 0..n_points.saturating_sub(1) {
        let (start, local) = interval_stencil(n_points, i);
        for (k, c) in local.iter().enumerate() {
            w[start + k] += c * h;
        }
    }
    w
}

// Stencil start and weights (in units of h) for the interval [x_i, x_{i+1}].
fn interval_stencil(n_points: usize, i: usize) -> (usize, &'static [f64]) {
    const TRAP: [f64; 2] = [0.5, 0.5];
    const Q_LEFT: [f64; 3] = [5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];
    const Q_RIGHT: [f64; 3] = [-1.0 / 12.0, 8.0 / 12.0, 5.0 / 12.0];
    const C_LEFT: [f64; 4] = [9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0];
    const C_MID: [f64; 4] = [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0];
    const C_RIGHT: [f64; 4] = [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0, 9.0 / 24.0];
    match n_points {
        2 => (0, &TRAP),
        3 => {
            if i == 0 {
                (0, &Q_LEFT)
            } else {
                (0, &Q_RIGHT)
            }
        }
        _ => {
            if i == 0 {
                (0, &C_LEFT)
            } else if i + 2 == n_points {
                (n_points - 4, &C_RIGHT)
            } else {
                (i - 1, &C_MID)
            }
        }
    }
}

/// Integral of the samples over the interval `[x_i, x_{i+1}]`.
pub(crate) fn interval_integral<T>(values: &[T], i: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let (start, local) = interval_stencil(values.len(), i);
    let mut acc = values[start] * (local[0] * h);
    for (k, c) in local.iter().enumerate().skip(1) {
        acc = acc + values[start + k] * (c * h);
    }
    acc
}

/// Running integral `c[i] = ∫_{x_0}^{x_i} f`, fourth order at every node.
pub fn cumulative_integral<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let mut out = Vec::with_capacity(values.len());
    if values.is_empty() {
        return out;
    }
    let mut acc = values[0] * 0.0;
    out.push(acc);
    for i in 0..values.len() - 1 {
        acc = acc + interval_integral(values, i, h);
        out.push(acc);
    }
    out
}

/// `∫_a^b f` for samples `f` on `grid`.
///
/// Node-aligned limits use Simpson; partial cells at non-node limits are
/// integrated exactly against the local cubic interpolant.
pub fn integrate(grid: &Grid1D, f: &[f64], a: f64, b: f64) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::Domain(format!(
            "{} samples for a grid of {} points",
            f.len(),
            grid.len()
        )));
    }
    if !(grid.contains(a) && grid.contains(b)) {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}] outside grid span [{}, {}]",
            grid.lo(),
            grid.hi()
        )));
    }
    if b < a {
        return integrate(grid, f, b, a).map(|v| -v);
    }
    if a == b {
        return Ok(0.0);
    }
    let h = grid.spacing();
    let first = match grid.node_index(a) {
        Some(i) => i,
        None => grid.cell_index(a) + 1,
    };
    let last = match grid.node_index(b) {
        Some(i) => i,
        None => grid.cell_index(b),
    };
    if first > last {
        return gauss_piece(grid, f, a, b);
    }
    let mut total = 0.0;
    if last > first {
        let w = simpson_weights(last - first + 1, h);
        total += f[first..=last].iter().zip(&w).map(|(v, w)| v * w).sum::<f64>();
    }
    let xa = grid.points()[first];
    let xb = grid.points()[last];
    if a < xa {
        total += gauss_piece(grid, f, a, xa)?;
    }
    if b > xb {
        total += gauss_piece(grid, f, xb, b)?;
    }
    Ok(total)
}

// Three-point Gauss-Legendre on the cubic interpolant (exact for it).
fn gauss_piece(grid: &Grid1D, f: &[f64], a: f64, b: f64) -> Result<f64> {
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (t, w) in NODES.iter().zip(WEIGHTS) {
        let (idx, c) = interpolation_stencil(grid, mid + half * t)?;
        let v: f64 = idx.iter().zip(&c).map(|(&i, c)| f[i] * c).sum();
        s += w * v;
    }
    Ok(s * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_on_unit_interval() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let f = vec![1.0; 101];
        assert!((integrate(&g, &f, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cos_squared() {
        let g = Grid1D::new(0.0, 1.0, 401).unwrap();
        let f = g.sample(|x| (PI * x).cos().powi(2));
        assert!((integrate(&g, &f, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn cubic_on_half_interval() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let f = g.sample(|x| x * x * x);
        assert!((integrate(&g, &f, 0.0, 0.5).unwrap() - 0.015625).abs() < 1e-12);
    }

    #[test]
    fn odd_interval_count_stays_accurate() {
        let g = Grid1D::new(0.0, 1.0, 100).unwrap();
        let f = g.sample(|x| (3.0 * x).exp());
        let exact = ((3.0f64).exp() - 1.0) / 3.0;
        assert!((integrate(&g, &f, 0.0, 1.0).unwrap() - exact).abs() < 1e-7);
    }

    #[test]
    fn off_node_limits() {
        let g = Grid1D::new(0.0, 1.0, 201).unwrap();
        let f = g.sample(|x| (PI * x).sin());
        let exact = ((PI * 0.1234).cos() - (PI * 0.8765).cos()) / PI;
        assert!((integrate(&g, &f, 0.1234, 0.8765).unwrap() - exact).abs() < 1e-9);
        let exact_inner = ((PI * 0.1001).cos() - (PI * 0.1022).cos()) / PI;
        assert!((integrate(&g, &f, 0.1001, 0.1022).unwrap() - exact_inner).abs() < 1e-12);
    }

    #[test]
    fn outside_span_is_domain_error() {
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        let f = vec![0.0; 11];
        assert!(matches!(integrate(&g, &f, -0.5, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let g = Grid1D::new(0.0, 1.0, 401).unwrap();
        let f = g.sample(|x| (2.0 * x).cos());
        let c = cumulative_integral(&f, g.spacing());
        for (x, v) in g.points().iter().zip(&c) {
            assert!((v - (2.0 * x).sin() / 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn interval_weights_short_grids() {
        let w3 = interval_rule_weights(3, 1.0);
        assert!((w3[0] - 1.0 / 3.0).abs() < 1e-15 && (w3[1] - 4.0 / 3.0).abs() < 1e-15);
        let w4 = interval_rule_weights(4, 0.5);
        let cubic: f64 = (0..4).map(|i| w4[i] * (0.5 * i as f64).powi(3)).sum();
        assert!((cubic - 1.5f64.powi(4) / 4.0).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn integrate_is_linear(alpha in -5.0f64..5.0, beta in -5.0f64..5.0, k in 1u32..6) {
            let g = Grid1D::new(0.0, 1.0, 101).unwrap();
            let f = g.sample(|x| (k as f64 * x).sin());
            let q = g.sample(|x| x.powi(k as i32));
            let comb: Vec<f64> = f.iter().zip(&q).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = integrate(&g, &comb, 0.0, 1.0).unwrap();
            let rhs = alpha * integrate(&g, &f, 0.0, 1.0).unwrap() + beta * integrate(&g, &q, 0.0, 1.0).unwrap();
            let scale = f.iter().chain(&q).fold(0.0f64, |m, v| m.max(v.abs()));
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-12 * (alpha.abs() + beta.abs()) * scale.max(1.0));
        }
    }
}
