use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which closed triangle (or square) a lattice covers.
///
/// For the physical domains the coordinates are `(x, y)`; for the
/// characteristic ones they are `(X, Y)`. In every case node `(i, j)` sits at
/// `(i h, j h)` with `h = (x_hi - x_lo) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainTag {
    /// `0 <= y <= x <= 1`.
    D,
    /// `0 <= y <= 1`, `y <= x <= 2 - y`.
    DTilde,
    /// `y <= x <= 1 - y`.
    Omega1,
    /// `1 - y <= x <= 1`, `y <= x`.
    Omega2,
    /// `X, Y >= 0`, `X + Y <= 1`.
    CharTriangle,
    /// `[0, 1]^2` in characteristic coordinates.
    CharSquare,
}

impl DomainTag {
    /// Length of the x-extent.
    pub fn extent(self) -> f64 {
        match self {
            DomainTag::DTilde => 2.0,
            _ => 1.0,
        }
    }

    /// Inclusive index range of row `j`, if the row is non-empty.
    pub fn row(self, n: usize, j: usize) -> Option<(usize, usize)> {
        if j > n {
            return None;
        }
        let (lo, hi) = match self {
            DomainTag::D => (j, n),
            DomainTag::DTilde | DomainTag::Omega1 => {
                if 2 * j > n {
                    return None;
                }
                (j, n - j)
            }
            DomainTag::Omega2 => (j.max(n - j), n),
            DomainTag::CharTriangle => (0, n - j),
            DomainTag::CharSquare => (0, n),
        };
        Some((lo, hi))
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainTag::D => "D",
            DomainTag::DTilde => "Dtilde",
            DomainTag::Omega1 => "Omega1",
            DomainTag::Omega2 => "Omega2",
            DomainTag::CharTriangle => "omega",
            DomainTag::CharSquare => "square",
        }
    }
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(DomainTag::D),
            "dtilde" | "d_tilde" => Ok(DomainTag::DTilde),
            "omega1" => Ok(DomainTag::Omega1),
            "omega2" => Ok(DomainTag::Omega2),
            "omega" | "char" | "triangle" => Ok(DomainTag::CharTriangle),
            "square" => Ok(DomainTag::CharSquare),
            _ => Err(Error::Domain(format!("unknown domain tag '{s}'"))),
        }
    }
}

/// A lattice node with its integer indices and coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeNode {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
}

/// Values on the lattice of a closed triangle, stored row by row
/// (`j` outer, `i` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleField<T> {
    tag: DomainTag,
    n: usize,
    h: f64,
    row_start: Vec<usize>,
    nodes: Vec<LatticeNode>,
    pub values: Vec<T>,
}

/// The empty lattice of `tag` at resolution `n`.
pub fn triangle_grid(tag: DomainTag, n: usize) -> Result<TriangleField<()>> {
    TriangleField::from_fn(tag, n, |_| ())
}

impl<T> TriangleField<T> {
    pub fn from_fn(tag: DomainTag, n: usize, mut f: impl FnMut(&LatticeNode) -> T) -> Result<Self> {
        let min = if matches!(tag, DomainTag::DTilde | DomainTag::Omega1) { 2 } else { 1 };
        if n < min {
            return Err(Error::Domain(format!("triangle resolution {n} too small")));
        }
        let h = tag.extent() / n as f64;
        let mut row_start = Vec::new();
        let mut nodes = Vec::new();
        for j in 0..=n {
            let Some((lo, hi)) = tag.row(n, j) else { break };
            row_start.push(nodes.len());
            for i in lo..=hi {
                nodes.push(LatticeNode {
                    i,
                    j,
                    x: i as f64 * h,
                    y: j as f64 * h,
                });
            }
        }
        row_start.push(nodes.len());
        let values = nodes.iter().map(&mut f).collect();
        Ok(Self {
            tag,
            n,
            h,
            row_start,
            nodes,
            values,
        })
    }

    /// Builds a field from values in storage order.
    pub fn with_values<U>(&self, values: Vec<U>) -> Result<TriangleField<U>> {
        if values.len() != self.nodes.len() {
            return Err(Error::Domain(format!(
                "{} values for a lattice of {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        Ok(TriangleField {
            tag: self.tag,
            n: self.n,
            h: self.h,
            row_start: self.row_start.clone(),
            nodes: self.nodes.clone(),
            values,
        })
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> TriangleField<U> {
        TriangleField {
            tag: self.tag,
            n: self.n,
            h: self.h,
            row_start: self.row_start.clone(),
            nodes: self.nodes.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Storage index of node `(i, j)`, if it belongs to the lattice.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = self.tag.row(self.n, j)?;
        if i < lo || i > hi {
            return None;
        }
        Some(self.row_start[j] + (i - lo))
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        self.index(i, j).map(|k| &self.values[k])
    }

    /// Value at `(i, j)`; panics when the node is outside the lattice.
    pub fn at(&self, i: usize, j: usize) -> &T {
        match self.index(i, j) {
            Some(k) => &self.values[k],
            None => panic!("node ({i}, {j}) outside {} lattice", self.tag),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) -> Result<()> {
        let k = self
            .index(i, j)
            .ok_or_else(|| Error::Domain(format!("node ({i}, {j}) outside {} lattice", self.tag)))?;
        self.values[k] = value;
        Ok(())
    }

    /// Inclusive index range of row `j`.
    pub fn row_range(&self, j: usize) -> Option<(usize, usize)> {
        self.tag.row(self.n, j)
    }

    /// Number of non-empty rows.
    pub fn rows(&self) -> usize {
        self.row_start.len() - 1
    }

    /// Values of row `j` in increasing `i`.
    pub fn row_values(&self, j: usize) -> &[T] {
        &self.values[self.row_start[j]..self.row_start[j + 1]]
    }
}
