//! Reference problems with two-sided characteristic data.

use nalgebra::{Matrix4, Vector4};

use super::{GoursatConfig, GoursatProblem};
use crate::error::Result;

/// A named problem together with a short description.
#[derive(Debug, Clone)]
pub struct CorpusProblem {
    pub name: &'static str,
    pub description: &'static str,
    pub problem: GoursatProblem,
}

// r = Q ⊗ I - I ⊗ P for constant symmetric 2x2 blocks, pulled back with scale 1.
fn kron_r(p: [[f64; 2]; 2], q: [[f64; 2]; 2]) -> Matrix4<f64> {
    Matrix4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (c, d) = (col / 2, col % 2);
        let left = if b == d { q[a][c] } else { 0.0 };
        let right = if a == c { p[d][b] } else { 0.0 };
        left - right
    })
}

/// The five problems used by the estimate checks, on `n` intervals.
pub fn corpus_problems(n: usize) -> Result<Vec<CorpusProblem>> {
    let tw = GoursatConfig::TwoSides;
    let e1 = Vector4::new(1.0, 0.0, 0.0, 0.0);
    let diag = kron_r([[1.0, 0.0], [0.0, 2.0]], [[3.0, 0.0], [0.0, 4.0]]);
    let coupled = kron_r([[1.0, 0.3], [0.3, 1.0]], [[1.0, 0.5], [0.5, 1.0]]);
    Ok(vec![
        CorpusProblem {
            name: "bessel",
            description: "R = I, F = G = e1; k1 = I0(2√(XY))",
            problem: GoursatProblem::from_fn(tw, n, |_, _| Matrix4::identity(), |_| e1, |_| e1)?,
        },
        CorpusProblem {
            name: "constant-diagonal",
            description: "r for P = diag(1, 2), Q = diag(3, 4)",
            problem: GoursatProblem::from_fn(
                tw,
                n,
                move |_, _| diag,
                |s| Vector4::new(1.0 + s, s * s, 0.0, 1.0),
                |s| Vector4::new(1.0 + s, 0.0, s, 1.0),
            )?,
        },
        CorpusProblem {
            name: "coupled",
            description: "r for P = [[1, .3], [.3, 1]], Q = [[1, .5], [.5, 1]]",
            problem: GoursatProblem::from_fn(
                tw,
                n,
                move |_, _| coupled,
                |s| Vector4::new(s.cos(), 0.5 * s, 0.0, 1.0 - s),
                |s| Vector4::new(1.0, -0.5 * s, s * s, 1.0),
            )?,
        },
        CorpusProblem {
            name: "smooth",
            description: "trigonometric R(X, Y), smooth data",
            problem: GoursatProblem::from_fn(
                tw,
                n,
                |x, y| {
                    Matrix4::from_fn(|a, b| {
                        let phase = (a as f64) - 0.5 * (b as f64);
                        0.2 * (phase + 2.0 * x).sin() + 0.15 * (phase - y).cos()
                    })
                },
                |s| Vector4::new((2.0 * s).sin(), 1.0, s.exp() - 1.0, 0.5 * s),
                |s| Vector4::new(s * (1.0 - s), 1.0 + s * s, 0.0, -s),
            )?,
        },
        CorpusProblem {
            name: "polynomial",
            description: "R = 0, polynomial data; k = F(X) + G(Y) - F(0)",
            problem: GoursatProblem::from_fn(
                tw,
                n,
                |_, _| Matrix4::zeros(),
                |s| Vector4::new(s * s, 1.0 - s, s.powi(3), 2.0),
                |s| Vector4::new(s, 1.0 + s * s, 0.0, 2.0 - s),
            )?,
        },
    ])
}
