use glparab_core::corpus;
use glparab_core::field::Grid1D;
use glparab_core::forward::{expand_initial, TimeGrid};
use glparab_core::potential::{MatrixPotential, VectorSpec};
use glparab_core::spectral::{find_spectrum, SpectralProblem};
use proptest::prelude::*;

fn coupled_solution() -> glparab_core::forward::ExpansionSolution {
    let e = corpus::lookup("coupled").unwrap();
    let table = find_spectrum(&SpectralProblem::with_default_grid(e.p).unwrap(), 12).unwrap();
    expand_initial(&table, &e.a.sample(&Grid1D::unit_default()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semigroup(t1 in 0.02..0.5f64, t2 in 0.02..0.5f64, x in 0.0..1.0f64) {
        let sol = coupled_solution();
        let restarted = expand_initial(&sol.table, &sol.snapshot(t1).unwrap()).unwrap();
        let a = sol.evaluate(x, t1 + t2).unwrap();
        let b = restarted.evaluate(x, t2).unwrap();
        prop_assert!((a - b).amax() <= 1e-7, "{a} vs {b}");
    }
}

#[test]
fn norm_decays_for_nonnegative_spectrum() {
    let sol = coupled_solution();
    assert!(sol.table.pairs[0].lambda >= 0.0);
    let times = TimeGrid::log_spaced(0.01, 3.0, 60).unwrap();
    let norms: Vec<f64> = times.times().iter().map(|&t| sol.snapshot(t).unwrap().norm()).collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-10), "{} then {}", w[0], w[1]);
    }
}

#[test]
fn uncoupled_component_stays_zero() {
    let p = MatrixPotential::parse("1 + 0.5*cos(pi*x)", "0", None, "2 + x^2").unwrap();
    let table = find_spectrum(&SpectralProblem::with_default_grid(p).unwrap(), 12).unwrap();
    let a = VectorSpec::parse("1 + x", "0").unwrap().sample(&Grid1D::unit_default()).unwrap();
    let sol = expand_initial(&table, &a).unwrap();
    for &t in TimeGrid::log_spaced(0.01, 3.0, 20).unwrap().times() {
        for x in [0.0, 0.3, 0.7, 1.0] {
            assert!(sol.evaluate(x, t).unwrap()[1].abs() <= 1e-9);
        }
    }
}
