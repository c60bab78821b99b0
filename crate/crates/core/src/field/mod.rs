//! Grids, sampled fields and the basic numerical toolkit (quadrature,
//! finite differences, local interpolation) shared by every solver.
//!
//! All grids are uniform. Fields always carry their own grid so that
//! quantities living on `[0, 1]`, `[0, 2]` and on triangles can be mixed
//! without a global registry.

mod quadrature;
mod stencil;
mod triangle;

pub use quadrature::{cumulative_integral, integrate, interval_rule_weights, simpson_weights};
pub use stencil::{differentiate, fornberg_weights, interpolate, interpolation_stencil};
pub use triangle::{triangle_grid, DomainTag, LatticeNode, TriangleField};

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// Uniform grid on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
    h: f64,
}

impl Grid1D {
    /// Uniform grid with `n_points` nodes; the end nodes are exactly `lo` and `hi`.
    pub fn new(lo: f64, hi: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::Domain(format!("invalid grid interval [{lo}, {hi}]")));
        }
        let intervals = (n_points - 1) as f64;
        let h = (hi - lo) / intervals;
        let mut points: Vec<f64> = (0..n_points)
            .map(|i| lo + (hi - lo) * (i as f64 / intervals))
            .collect();
        points[n_points - 1] = hi;
        Ok(Self { points, h })
    }

    /// The default `[0, 1]` discretization used throughout (401 nodes).
    pub fn unit_default() -> Self {
        Self::new(0.0, 1.0, DEFAULT_NODES).expect("static grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (self.hi() - self.lo());
        x >= self.lo() - slack && x <= self.hi() + slack
    }

    /// Index of the node equal to `x` (within rounding), if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let s = (x - self.lo()) / self.h;
        let i = s.round();
        if i < 0.0 || i as usize >= self.len() {
            return None;
        }
        if (s - i).abs() <= 1e-9 {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Index `i` of the cell `[x_i, x_{i+1}]` containing `x` (clamped to the grid).
    pub fn cell_index(&self, x: f64) -> usize {
        let s = ((x - self.lo()) / self.h).floor();
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.len() - 2)
        }
    }

    /// Samples `f` at every node.
    pub fn sample<T>(&self, f: impl Fn(f64) -> T) -> Vec<T> {
        self.points.iter().map(|&x| f(x)).collect()
    }
}

/// Default number of nodes on `[0, 1]`.
pub const DEFAULT_NODES: usize = 401;

/// A sampled `R^2`-valued function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorValuedField {
    pub grid: Grid1D,
    pub values: Vec<Vector2<f64>>,
}

impl VectorValuedField {
    pub fn new(grid: Grid1D, values: Vec<Vector2<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::Domain("field contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Vector2<f64>) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let values = vec![Vector2::zeros(); grid.len()];
        Self { grid, values }
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    pub fn from_components(grid: Grid1D, first: &[f64], second: &[f64]) -> Result<Self> {
        let values = first
            .iter()
            .zip(second)
            .map(|(&a, &b)| Vector2::new(a, b))
            .collect();
        Self::new(grid, values)
    }

    /// `L^2(0,1)^2` inner product by Simpson quadrature; the grids must agree.
    pub fn inner(&self, other: &VectorValuedField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Domain("inner product of fields on different grids".into()));
        }
        let w = simpson_weights(self.grid.len(), self.grid.spacing());
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&w)
            .map(|((a, b), w)| w * a.dot(b))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Componentwise derivative of the requested order.
    pub fn derivative(&self, order: usize) -> Result<VectorValuedField> {
        let d0 = differentiate(&self.grid, &self.component(0), order)?;
        let d1 = differentiate(&self.grid, &self.component(1), order)?;
        VectorValuedField::from_components(self.grid.clone(), &d0, &d1)
    }

    /// Cubic interpolation at `x`.
    pub fn at(&self, x: f64) -> Result<Vector2<f64>> {
        let (idx, w) = interpolation_stencil(&self.grid, x)?;
        Ok(idx
            .iter()
            .zip(&w)
            .fold(Vector2::zeros(), |acc, (&i, &w)| acc + self.values[i] * w))
    }

    /// Re-samples onto another grid by cubic interpolation.
    pub fn resample(&self, grid: &Grid1D) -> Result<VectorValuedField> {
        if grid == &self.grid {
            return Ok(self.clone());
        }
        let values = grid
            .points()
            .iter()
            .map(|&x| self.at(x))
            .collect::<Result<Vec<_>>>()?;
        VectorValuedField::new(grid.clone(), values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.amax()).fold(0.0, f64::max)
    }
}

/// Symmetric 2x2 samples helper: `(m11, m12, m22)`.
pub fn symmetric_entries(m: &Matrix2<f64>) -> (f64, f64, f64) {
    (m[(0, 0)], m[(0, 1)], m[(1, 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid1D::new(0.0, 1.0, 401).unwrap();
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[400], 1.0);
        for w in g.points().windows(2) {
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_rejects_degenerate() {
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn node_lookup() {
        let g = Grid1D::new(0.0, 2.0, 801).unwrap();
        assert_eq!(g.node_index(1.0), Some(400));
        assert_eq!(g.node_index(1.0 + 1e-3), None);
        assert_eq!(g.cell_index(2.0), 799);
    }

    #[test]
    fn vector_field_length_checked() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        assert!(VectorValuedField::new(g, vec![Vector2::zeros(); 4]).is_err());
    }
}
