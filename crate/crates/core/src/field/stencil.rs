use super::Grid1D;
use crate::error::{Error, Result};

const DIFF_POINTS: usize = 7;

/// Finite-difference weights at `x0` for derivatives up to `max_order`
/// on arbitrary nodes (Fornberg's recursion). Row `k` holds the weights of
/// the `k`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of the given order of sampled data, using 7-point stencils
/// (centred in the interior, shifted inward near the ends).
pub fn differentiate(grid: &Grid1D, f: &[f64], order: usize) -> Result<Vec<f64>> {
    let n = grid.len();
    if f.len() != n {
        return Err(Error::Domain(format!(
            "{} samples for a grid of {n} points",
            f.len()
        )));
    }
    if n < 5 {
        return Err(Error::Domain(format!(
            "differentiation needs at least 5 grid points, got {n}"
        )));
    }
    if order == 0 {
        return Ok(f.to_vec());
    }
    let width = DIFF_POINTS.min(n);
    if order >= width {
        return Err(Error::Domain(format!(
            "derivative of order {order} needs more than {n} points"
        )));
    }
    let h = grid.spacing();
    // Stencils depend only on the offset of the target inside the window, so
    // build them once in index units and rescale.
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; width];
    let scale = h.powi(order as i32);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(width / 2).min(n - width);
        let offset = i - start;
        let w = cache[offset].get_or_insert_with(|| {
            let nodes: Vec<f64> = (0..width).map(|k| k as f64).collect();
            fornberg_weights(offset as f64, &nodes, order).swap_remove(order)
        });
        let v: f64 = w.iter().zip(&f[start..start + width]).map(|(w, v)| w * v).sum();
        out.push(v / scale);
    }
    Ok(out)
}

/// Indices and weights of the cubic (4-point Lagrange) interpolant at `x`.
/// At a node the stencil is that node alone, so nodal values are reproduced
/// exactly.
pub fn interpolation_stencil(grid: &Grid1D, x: f64) -> Result<(Vec<usize>, Vec<f64>)> {
    if !x.is_finite() || !grid.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside grid span [{}, {}]",
            grid.lo(),
            grid.hi()
        )));
    }
    if let Some(i) = grid.node_index(x) {
        if (grid.points()[i] - x).abs() <= 1e-14 * (1.0 + x.abs()) {
            return Ok((vec![i], vec![1.0]));
        }
    }
    let n = grid.len();
    let width = 4.min(n);
    let cell = grid.cell_index(x);
    let start = cell.saturating_sub(1).min(n - width);
    let idx: Vec<usize> = (start..start + width).collect();
    let nodes: Vec<f64> = idx.iter().map(|&i| grid.points()[i]).collect();
    let mut w = vec![1.0; width];
    for (a, wa) in w.iter_mut().enumerate() {
        for (b, xb) in nodes.iter().enumerate() {
            if a != b {
                *wa *= (x - xb) / (nodes[a] - xb);
            }
        }
    }
    Ok((idx, w))
}

/// Cubic interpolation of samples `f` at `x`.
pub fn interpolate(grid: &Grid1D, f: &[f64], x: f64) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::Domain(format!(
            "{} samples for a grid of {} points",
            f.len(),
            grid.len()
        )));
    }
    let (idx, w) = interpolation_stencil(grid, x)?;
    Ok(idx.iter().zip(&w).map(|(&i, w)| f[i] * w).sum())
}
