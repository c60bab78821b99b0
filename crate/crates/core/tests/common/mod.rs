//! Independent reference values for the integration tests.
#![allow(dead_code)]

use glparab_core::forward::BoundaryTrace;
use nalgebra::{Matrix2, Matrix4, Vector2};

/// `I_0(2 sqrt(s)) = Σ s^k / (k!)^2`, summed until the terms vanish.
pub fn bessel_series(s: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0;
    while term.abs() > 1e-20 * sum.abs() {
        term *= s / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Neumann spectrum of a constant symmetric potential, through the rotation
/// that diagonalizes it: `{d_i + (kπ)^2}` merged and sorted.
pub fn constant_spectrum(p: &Matrix2<f64>, count: usize) -> Vec<f64> {
    let (a, b, c) = (p[(0, 0)], p[(0, 1)], p[(1, 1)]);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (s, co) = theta.sin_cos();
    let u = Matrix2::new(co, -s, s, co);
    let d = u.transpose() * p * u;
    assert!(d[(0, 1)].abs() < 1e-14, "rotation did not diagonalize");
    let mut out = Vec::new();
    for k in 0..count {
        let w = (k as f64 * std::f64::consts::PI).powi(2);
        out.push(d[(0, 0)] + w);
        out.push(d[(1, 1)] + w);
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.truncate(count);
    out
}

/// `Σ_n e^{-r_n t} A_n` with `A_n = (left1, left2, right1, right2)`.
pub fn synthetic_trace(times: &[f64], rates: &[f64], amplitudes: &[[f64; 4]]) -> BoundaryTrace {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &t in times {
        let mut l = Vector2::zeros();
        let mut r = Vector2::zeros();
        for (rate, a) in rates.iter().zip(amplitudes) {
            let e = (-rate * t).exp();
            l += Vector2::new(a[0], a[1]) * e;
            r += Vector2::new(a[2], a[3]) * e;
        }
        left.push(l);
        right.push(r);
    }
    BoundaryTrace::new(times.to_vec(), left, right).unwrap()
}

/// A smooth, fully coupled coefficient for Goursat tests.
pub fn smooth_r(x: f64, y: f64) -> Matrix4<f64> {
    Matrix4::from_fn(|a, b| 0.1 * ((a + 2 * b) as f64 * 0.3 + x - y).cos())
}

pub fn log_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}
