//! Discrete line integrals on the characteristic lattice.
//!
//! Rows are lines of constant `Y` (index `j`), columns lines of constant `X`
//! (index `i`). Every row and column starts at index 0.

use nalgebra::Vector4;
use rayon::prelude::*;

use crate::field::{cumulative_integral, DomainTag, TriangleField};

pub type V4 = Vector4<f64>;

fn col_len(f: &TriangleField<V4>, i: usize) -> usize {
    let n = f.resolution();
    match f.tag() {
        DomainTag::CharSquare => n + 1,
        _ => n - i + 1,
    }
}

/// `∫_0^{X_i} f(ξ, Y_j) dξ` at every node.
pub fn row_cumulative(f: &TriangleField<V4>) -> TriangleField<V4> {
    let h = f.spacing();
    let rows: Vec<Vec<V4>> = (0..f.rows())
        .into_par_iter()
        .map(|j| cumulative_integral(f.row_values(j), h))
        .collect();
    f.with_values(rows.concat()).expect("same lattice")
}

/// `∫_0^{Y_j} f(X_i, η) dη` at every node.
pub fn column_cumulative(f: &TriangleField<V4>) -> TriangleField<V4> {
    let h = f.spacing();
    let n = f.resolution();
    let cols: Vec<Vec<V4>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let len = col_len(f, i);
            let vals: Vec<V4> = (0..len).map(|j| *f.at(i, j)).collect();
            cumulative_integral(&vals, h)
        })
        .collect();
    let mut out = f.values.clone();
    for (i, col) in cols.iter().enumerate() {
        for (j, v) in col.iter().enumerate() {
            let k = f.index(i, j).expect("column node");
            out[k] = *v;
        }
    }
    f.with_values(out).expect("same lattice")
}

/// Largest max-norm entry of a field.
pub fn sup(f: &TriangleField<V4>) -> f64 {
    f.values.iter().map(|v| v.amax()).fold(0.0, f64::max)
}

/// Largest max-norm difference of two fields on one lattice.
pub fn sup_diff(a: &TriangleField<V4>, b: &TriangleField<V4>) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).amax())
        .fold(0.0, f64::max)
}

/// Derivative along rows (`d/dX`) or columns (`d/dY`) by finite differences.
pub fn differentiate_lines(f: &TriangleField<V4>, along_rows: bool) -> TriangleField<V4> {
    let h = f.spacing();
    let n = f.resolution();
    let mut out = f.values.clone();
    let lines = if along_rows { f.rows() } else { n + 1 };
    for l in 0..lines {
        let len = if along_rows { f.row_values(l).len() } else { col_len(f, l) };
        let node = |s: usize| if along_rows { (s, l) } else { (l, s) };
        let vals: Vec<V4> = (0..len).map(|s| {
            let (i, j) = node(s);
            *f.at(i, j)
        }).collect();
        let d = line_derivative(&vals, h);
        for (s, v) in d.into_iter().enumerate() {
            let (i, j) = node(s);
            out[f.index(i, j).expect("line node")] = v;
        }
    }
    f.with_values(out).expect("same lattice")
}

// Fourth-order where the line is long enough, lower order on short lines.
fn line_derivative(v: &[V4], h: f64) -> Vec<V4> {
    let n = v.len();
    match n {
        0 => Vec::new(),
        1 => vec![V4::zeros()],
        2 => {
            let d = (v[1] - v[0]) / h;
            vec![d, d]
        }
        3 | 4 => (0..n)
            .map(|i| {
                if i == 0 {
                    (v[1] * 4.0 - v[0] * 3.0 - v[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) / (2.0 * h)
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
        _ => {
            let grid = crate::field::Grid1D::new(0.0, h * (n - 1) as f64, n).expect("line grid");
            let mut out = vec![V4::zeros(); n];
            for c in 0..4 {
                let comp: Vec<f64> = v.iter().map(|x| x[c]).collect();
                let d = crate::field::differentiate(&grid, &comp, 1).expect("line long enough");
                for (o, dv) in out.iter_mut().zip(d) {
                    o[c] = dv;
                }
            }
            out
        }
    }
}
