mod common;

use glparab_core::corpus;
use glparab_core::kernel::build_kernel;
use nalgebra::Matrix2;

#[test]
fn kernel_solves_its_hyperbolic_equation() {
    let e = corpus::lookup("smooth").unwrap();
    let m = 400;
    let kernel = build_kernel(&e.p, &e.q, m).unwrap();
    let h = 1.0 / m as f64;
    let k = |i: usize, j: usize| *kernel.k.at(i, j);
    let mut worst = 0.0f64;
    for j in 1..m {
        for i in (j + 2)..m {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let kxx = (k(i + 1, j) - 2.0 * k(i, j) + k(i - 1, j)) / (h * h);
            let kyy = (k(i, j + 1) - 2.0 * k(i, j) + k(i, j - 1)) / (h * h);
            let r: Matrix2<f64> = kxx - kyy + k(i, j) * e.p.eval(y).unwrap() - e.q.eval(x).unwrap() * k(i, j);
            worst = worst.max(r.amax());
        }
    }
    assert!(worst <= 1e-4, "{worst:e}");
}

#[test]
fn diagonal_matches_quadrature_oracle() {
    let e = corpus::lookup("smooth").unwrap();
    let kernel = build_kernel(&e.p, &e.q, 200).unwrap();
    for i in (0..=200).step_by(20) {
        let x = i as f64 / 200.0;
        let want = Matrix2::from_fn(|a, b| {
            0.5 * common::adaptive_simpson(&|s| (e.q.eval(s).unwrap() - e.p.eval(s).unwrap())[(a, b)], 0.0, x, 1e-13)
        });
        assert!((kernel.k.at(i, i) - want).amax() <= 1e-6, "x = {x}");
    }
}

#[test]
fn swapping_the_pair_negates_the_trace() {
    let e = corpus::lookup("smooth").unwrap();
    let pq = build_kernel(&e.p, &e.q, 120).unwrap();
    let qp = build_kernel(&e.q, &e.p, 120).unwrap();
    for i in 0..=120 {
        assert!((pq.k.at(i, i) + qp.k.at(i, i)).amax() <= 1e-8);
    }
}
