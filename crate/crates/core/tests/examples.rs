//! Small worked cases with closed-form answers.

mod common;

use std::f64::consts::PI;

use nalgebra::Vector2;

use glparab_core::corpus;
use glparab_core::field::Grid1D;
use glparab_core::forward::{boundary_traces, expand_initial, BoundaryTrace, TimeGrid};
use glparab_core::goursat::{back_transform, corpus_problems, picard_solve, PicardOptions};
use glparab_core::inverse::{compare_spectral_data, extract_modes, kernel_boundary_test, MatchTolerances};
use glparab_core::kernel::{build_kernel, transform_pair, KernelField};
use glparab_core::potential::{MatrixPotential, VectorSpec};
use glparab_core::spectral::{find_spectrum, SpectralProblem};

fn transformed(kernel: &KernelField, lambda: f64, xi: Vector2<f64>) -> (Vec<f64>, Vec<Vector2<f64>>) {
    let grid = Grid1D::new(0.0, 1.0, kernel.resolution() + 1).unwrap();
    let problem = SpectralProblem::new(kernel.p.clone(), grid).unwrap();
    let (psi, dpsi) = problem.fundamental_matrix(lambda).unwrap().apply(&xi);
    let t = transform_pair(kernel, &psi, &dpsi, lambda).unwrap();
    (t.phi.grid.points().to_vec(), t.phi.values)
}

fn trace_of(p: &MatrixPotential, a: &VectorSpec, modes: usize) -> BoundaryTrace {
    let table = find_spectrum(&SpectralProblem::with_default_grid(p.clone()).unwrap(), modes).unwrap();
    let sol = expand_initial(&table, &a.sample(&Grid1D::unit_default()).unwrap()).unwrap();
    boundary_traces(&sol, &TimeGrid::default_window()).unwrap()
}

#[test]
fn transform_with_equal_potentials_is_identity() {
    let p = corpus::lookup("smooth").unwrap().p;
    let kernel = build_kernel(&p, &p, 200).unwrap();
    let grid = Grid1D::new(0.0, 1.0, 201).unwrap();
    let (psi, _) = SpectralProblem::new(p, grid)
        .unwrap()
        .fundamental_matrix(7.5)
        .unwrap()
        .apply(&Vector2::new(0.3, -1.2));
    let (_, phi) = transformed(&kernel, 7.5, Vector2::new(0.3, -1.2));
    let err = phi.iter().zip(&psi.values).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
    assert!(err <= 1e-12, "{err:e}");
}

#[test]
fn transform_from_zero_to_identity_potential() {
    let kernel = build_kernel(&MatrixPotential::zero(), &MatrixPotential::diagonal(1.0, 1.0), 400).unwrap();
    let lambda = PI * PI;
    let w = (lambda - 1.0).sqrt();
    let (xs, phi) = transformed(&kernel, lambda, Vector2::new(1.0, 0.0));
    for (x, v) in xs.iter().zip(&phi) {
        assert!((v[0] - (w * x).cos()).abs() <= 1e-4, "x = {x}: {} vs {}", v[0], (w * x).cos());
        assert!(v[1].abs() <= 1e-10);
    }
}

#[test]
fn transform_is_linear_in_initial_vector() {
    let e = corpus::lookup("coupled").unwrap();
    let kernel = build_kernel(&e.p, &e.q, 200).unwrap();
    let (_, a) = transformed(&kernel, 4.0, Vector2::new(1.0, 0.0));
    let (_, b) = transformed(&kernel, 4.0, Vector2::new(0.0, 1.0));
    let (_, c) = transformed(&kernel, 4.0, Vector2::new(2.0, -3.0));
    for k in 0..c.len() {
        assert!((c[k] - (a[k] * 2.0 - b[k] * 3.0)).amax() <= 1e-10);
    }
}

#[test]
fn bessel_problem_back_transform_residual() {
    let problem = corpus_problems(100)
        .unwrap()
        .into_iter()
        .find(|c| c.name == "bessel")
        .unwrap()
        .problem;
    let sol = picard_solve(&problem, PicardOptions::default()).unwrap();
    let field = back_transform(&sol, &problem.r);
    assert!(field.residual <= 1e-4, "{:e}", field.residual);
    assert_eq!(field.points.len(), sol.k.len());
}

#[test]
fn two_synthetic_rates() {
    let times = common::log_times(0.01, 3.0, 600);
    let trace = common::synthetic_trace(&times, &[1.3, 9.1], &[[1.0, -0.5, 0.25, 2.0], [0.7, 0.1, -1.0, 0.3]]);
    let ext = extract_modes(&trace, 2).unwrap();
    let rates = ext.rates();
    assert!((rates[0] - 1.3).abs() <= 1e-6 && (rates[1] - 9.1).abs() <= 1e-6, "{rates:?}");
}

#[test]
fn constant_data_on_diagonal_potential_has_two_rates() {
    let trace = trace_of(&MatrixPotential::diagonal(1.0, 2.0), &VectorSpec::constant(1.0, 1.0), 6);
    let rates = extract_modes(&trace, 2).unwrap().rates();
    assert!((rates[0] - 1.0).abs() <= 1e-6 && (rates[1] - 2.0).abs() <= 1e-6, "{rates:?}");
}

#[test]
fn comparison_of_scaled_and_shifted_data() {
    let e = corpus::lookup("coupled").unwrap();
    let base = extract_modes(&trace_of(&e.p, &e.a, 12), 4).unwrap();
    let same = compare_spectral_data(&base, &base, MatchTolerances::default()).unwrap();
    assert!(same.matched);
    assert!(same.modes.iter().all(|m| (m.c_n - 1.0).abs() <= 1e-12));

    let mut doubled = e.a.sample(&Grid1D::unit_default()).unwrap();
    doubled.values.iter_mut().for_each(|v| *v *= 2.0);
    let doubled = VectorSpec::Sampled(doubled);
    let twice = extract_modes(&trace_of(&e.p, &doubled, 12), 4).unwrap();
    let r = compare_spectral_data(&base, &twice, MatchTolerances::default()).unwrap();
    for m in &r.modes {
        assert!((m.c_n - 2.0).abs() <= 1e-6, "mode {}: c = {}", m.index, m.c_n);
    }

    let a = VectorSpec::constant(1.0, 1.0);
    let p = extract_modes(&trace_of(&MatrixPotential::diagonal(1.0, 2.0), &a, 6), 2).unwrap();
    let q = extract_modes(&trace_of(&MatrixPotential::diagonal(1.5, 2.0), &a, 6), 2).unwrap();
    let r = compare_spectral_data(&p, &q, MatchTolerances::default()).unwrap();
    assert!(!r.matched);
    assert!((r.modes[0].rate_diff.abs() - 0.5).abs() <= 1e-6, "{}", r.modes[0].rate_diff);
}

#[test]
fn kernel_boundary_moments() {
    let p = corpus::lookup("smooth").unwrap().p;
    let table = find_spectrum(&SpectralProblem::with_default_grid(p.clone()).unwrap(), 6).unwrap();
    let same = kernel_boundary_test(&build_kernel(&p, &p, 200).unwrap(), &table).unwrap();
    assert!(same.moments.iter().all(|m| m.amax() <= 1e-7));

    // P = 0 has a double spectrum, so K(1, ·) is measured directly.
    let kernel = build_kernel(&MatrixPotential::zero(), &MatrixPotential::diagonal(1.0, 1.0), 200).unwrap();
    let sup = kernel.at_x1().iter().map(|m| m.amax()).fold(0.0, f64::max);
    assert!(sup > 0.1, "{sup}");
}
