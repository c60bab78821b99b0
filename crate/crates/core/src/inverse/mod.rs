//! Spectral data from boundary traces and the uniqueness pipeline.
//!
//! Traces are decomposed into decaying exponentials (rates are eigenvalues,
//! amplitudes are `(a, ψ_n)/ρ_n ψ_n(0)` and `(a, ψ_n)/ρ_n ψ_n(1)`). Two systems
//! with matching traces are then pushed through the kernel argument: `K(1, ·)`
//! and `K_x(1, ·)` vanish, which propagates `K ≡ 0` over `D` and forces
//! `½∫_0^x (Q - P) = 0`.

pub mod fit;

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::field::{Grid1D, VectorValuedField};
use crate::forward::{boundary_traces, expand_initial, BoundaryTrace, TimeGrid};
use crate::goursat::{picard_solve, CharFrame, GoursatConfig, GoursatProblem, PicardOptions};
use crate::kernel::{assemble_r, build_kernel, unit_weights, vectorize, KernelField, DEFAULT_KERNEL_RESOLUTION};
use crate::potential::{MatrixPotential, VectorSpec};
use crate::spectral::{find_spectrum, generating_element_check, GeneratingReport, SpectralProblem, SpectrumTable};
use fit::{peel, varpro};

/// Largest accepted `max |trace - fit| / max |trace|`.
pub const FIT_TOLERANCE: f64 = 1e-8;

/// One decaying mode of a boundary trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedMode {
    pub index: usize,
    pub rate: f64,
    pub left: Vector2<f64>,
    pub right: Vector2<f64>,
    /// Rate refitted alone after subtracting every other fitted mode.
    pub deflated_rate: f64,
}

impl ExtractedMode {
    pub fn amplitude(&self) -> Vector4<f64> {
        Vector4::new(self.left[0], self.left[1], self.right[0], self.right[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub modes: Vec<ExtractedMode>,
    /// Joint fit residual relative to the trace size.
    pub residual: f64,
    /// First time used; earlier samples carry unresolved fast modes.
    pub window_start: f64,
    pub warnings: Vec<String>,
}

impl Extraction {
    pub fn rates(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.rate).collect()
    }
}

/// Fits `m` modes to a trace (see [`extract_modes_with`]).
pub fn extract_modes(trace: &BoundaryTrace, m: usize) -> Result<Extraction> {
    extract_modes_with(trace, m, FIT_TOLERANCE)
}

/// Peeling initialization, joint variable-projection refinement, and
/// leave-one-out deflation estimates. Early samples are dropped until the
/// joint fit reaches `tolerance`.
pub fn extract_modes_with(trace: &BoundaryTrace, m: usize, tolerance: f64) -> Result<Extraction> {
    let t = trace.len();
    if m == 0 {
        return Err(Error::Precondition("at least one mode must be extracted".into()));
    }
    if t < 10 * m {
        return Err(Error::Precondition(format!("{t} samples cannot resolve {m} modes (need {})", 10 * m)));
    }
    let (t0, t1) = (trace.times[0], trace.times[t - 1]);
    if !(t0 > 0.0 && t1 >= 10.0 * t0) {
        return Err(Error::Precondition(format!("window [{t0}, {t1}] spans less than a decade")));
    }
    let y = DMatrix::from_fn(t, 4, |i, c| trace.channels(i)[c]);
    let step = (t / 40).max(1);
    let mut best = f64::INFINITY;
    let mut start = 0;
    while t - start >= 10 * m {
        let times = &trace.times[start..];
        let ys = y.rows(start, t - start).into_owned();
        if let Some(fit) = peel(times, &ys, m).and_then(|init| varpro(times, &ys, &init, 300)) {
            best = best.min(fit.relative_residual);
            if fit.relative_residual <= tolerance {
                return Ok(finish_extraction(times, &ys, fit));
            }
        }
        start += step;
    }
    Err(Error::UnderResolvedTrace {
        residual: best,
        tolerance,
        modes: m,
    })
}

fn finish_extraction(times: &[f64], y: &DMatrix<f64>, fit: fit::ExpFit) -> Extraction {
    let m = fit.rates.len();
    let mut modes = Vec::with_capacity(m);
    for n in 0..m {
        let mut deflated = y.clone();
        for k in (0..m).filter(|&k| k != n) {
            for (i, &ti) in times.iter().enumerate() {
                let e = (-fit.rates[k] * ti).exp();
                for c in 0..4 {
                    deflated[(i, c)] -= fit.amplitudes[(k, c)] * e;
                }
            }
        }
        let deflated_rate = varpro(times, &deflated, &[fit.rates[n]], 100)
            .map(|f| f.rates[0])
            .unwrap_or(f64::NAN);
        let a = |c| fit.amplitudes[(n, c)];
        modes.push(ExtractedMode {
            index: n + 1,
            rate: fit.rates[n],
            left: Vector2::new(a(0), a(1)),
            right: Vector2::new(a(2), a(3)),
            deflated_rate,
        });
    }
    let warnings = fit
        .rates
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] - w[0] < 1e-6 * w[1].abs().max(1.0))
        .map(|(k, w)| format!("modes {} and {} nearly merged ({} vs {})", k + 1, k + 2, w[0], w[1]))
        .collect();
    Extraction {
        modes,
        residual: fit.relative_residual,
        window_start: times[0],
        warnings,
    }
}

/// Per-mode comparison of two extractions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatch {
    pub index: usize,
    pub lambda_p: f64,
    pub lambda_q: f64,
    pub rate_diff: f64,
    /// Least-squares `c` with `A_Q ≈ c A_P` over both endpoints.
    pub c_n: f64,
    /// `|A_Q - c A_P|` at each endpoint, relative to `|A_Q|`.
    pub left_residual: f64,
    pub right_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub modes: Vec<ModeMatch>,
    pub matched: bool,
}

/// Tolerances for [`compare_spectral_data`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTolerances {
    pub rate: f64,
    pub proportionality: f64,
}

impl Default for MatchTolerances {
    fn default() -> Self {
        Self {
            rate: 1e-6,
            proportionality: 1e-6,
        }
    }
}

pub fn compare_spectral_data(p: &Extraction, q: &Extraction, tol: MatchTolerances) -> Result<MatchReport> {
    if p.modes.len() != q.modes.len() {
        return Err(Error::Precondition(format!(
            "extractions have {} and {} modes",
            p.modes.len(),
            q.modes.len()
        )));
    }
    let modes: Vec<ModeMatch> = p
        .modes
        .iter()
        .zip(&q.modes)
        .map(|(mp, mq)| {
            let (ap, aq) = (mp.amplitude(), mq.amplitude());
            let denom = ap.norm_squared();
            let c_n = if denom > 0.0 { ap.dot(&aq) / denom } else { 0.0 };
            let scale = aq.norm().max(f64::MIN_POSITIVE);
            ModeMatch {
                index: mp.index,
                lambda_p: mp.rate,
                lambda_q: mq.rate,
                rate_diff: (mp.rate - mq.rate).abs(),
                c_n,
                left_residual: (mq.left - mp.left * c_n).norm() / scale,
                right_residual: (mq.right - mp.right * c_n).norm() / scale,
            }
        })
        .collect();
    let matched = modes.iter().all(|m| {
        m.rate_diff <= tol.rate * (1.0 + m.lambda_p.abs())
            && m.left_residual <= tol.proportionality
            && m.right_residual <= tol.proportionality
            && m.c_n != 0.0
    });
    Ok(MatchReport { modes, matched })
}

/// Size of `K(1, ·)` and `K_x(1, ·)`, and the moments against `P`-eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub sup_k_1y: f64,
    pub sup_kx_1y: f64,
    /// `∫_0^1 K(1, y) ψ_n(y) dy`, `n = 1..`.
    pub moments: Vec<Vector2<f64>>,
    /// `C = Σ_n sup|ψ_n| / ρ_n`: the projection of `K(1, ·)` onto the
    /// moment modes is bounded by `C max_n |moment_n|`.
    pub projection_constant: f64,
}

pub fn kernel_boundary_test(kernel: &KernelField, table: &SpectrumTable) -> Result<BoundaryReport> {
    let k1 = kernel.at_x1();
    let kx1 = kernel.kx_at_x1();
    let grid = kernel.grid();
    let w = unit_weights(kernel);
    let mut moments = Vec::new();
    let mut projection_constant = 0.0;
    for pair in table.pairs.iter().take(6) {
        let psi = pair.eigenfunction.resample(&grid)?;
        let mut mom = Vector2::zeros();
        for (q, wq) in w.iter().enumerate() {
            mom += k1[q] * psi.values[q] * *wq;
        }
        moments.push(mom);
        projection_constant += psi.sup_norm() / pair.rho;
    }
    Ok(BoundaryReport {
        sup_k_1y: k1.iter().map(|m| m.amax()).fold(0.0, f64::max),
        sup_kx_1y: kx1.iter().map(|m| m.amax()).fold(0.0, f64::max),
        moments,
        projection_constant,
    })
}

/// `K` rebuilt over `D` from its Cauchy data on `x = 1` (side-and-normal
/// data then complete it on the rest of `D`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    /// `sup |K|` on `Ω₂ = D ∩ {x + y >= 1}`.
    pub sup_omega2: f64,
    /// `sup |K|` on `Ω₁ = D ∩ {x + y <= 1}`.
    pub sup_omega1: f64,
    /// `sup_x |K(x, x)|` from the replay, i.e. `sup |½∫_0^x (Q - P)|`.
    pub diagonal_max: f64,
    /// Largest difference between the replay and the directly built kernel.
    pub reconstruction_error: f64,
}

impl ReplayReport {
    pub fn sup_k(&self) -> f64 {
        self.sup_omega1.max(self.sup_omega2)
    }
}

/// Replays the propagation on the kernel's own lattice (`m` must be even).
///
/// `Ω₂` uses the frame `(x, y) = (½, ½) + X(½, ½) + Y(½, -½)`, whose
/// hypotenuse is `x = 1`: Cauchy data `F(X) = K(1, X)`,
/// `G(Y) = K_x(1, 1 - Y)/√2`. `Ω₁` uses `(½, ½) + X(½, -½) + Y(-½, -½)`:
/// `K` on `x + y = 1` comes from the `Ω₂` solution and the normal data on
/// `y = 0` is `-K_y(x, 0)/√2`.
pub fn replay_propagation(kernel: &KernelField) -> Result<ReplayReport> {
    let m = kernel.resolution();
    if m % 2 != 0 {
        return Err(Error::Configuration(format!("propagation replay needs an even kernel resolution, got {m}")));
    }
    let n = m / 2;
    let rfield = assemble_r(&kernel.p, &kernel.q);

    let frame2 = CharFrame::new((0.5, 0.5), (0.5, 0.5), (0.5, -0.5))?;
    let r2 = GoursatProblem::assemble_rhs(GoursatConfig::CauchyOnAB, n, &frame2, |x, y| rfield.at(x, y))?;
    let f2: Vec<Vector4<f64>> = (0..=n).map(|i| vectorize(kernel.k.at(m, 2 * i))).collect();
    let g2: Vec<Vector4<f64>> = (0..=n).map(|j| vectorize(kernel.kx.at(m, m - 2 * j)) / SQRT_2).collect();
    let s2 = picard_solve(&GoursatProblem::new(GoursatConfig::CauchyOnAB, r2, f2, g2)?, PicardOptions::default())?;

    let frame1 = CharFrame::new((0.5, 0.5), (0.5, -0.5), (-0.5, -0.5))?;
    let r1 = GoursatProblem::assemble_rhs(GoursatConfig::SideAndNormal, n, &frame1, |x, y| rfield.at(x, y))?;
    let f1: Vec<Vector4<f64>> = (0..=n).map(|i| *s2.k.at(0, i)).collect();
    let g1: Vec<Vector4<f64>> = (0..=n).map(|j| -vectorize(kernel.ky.at(m - 2 * j, 0)) / SQRT_2).collect();
    let s1 = picard_solve(&GoursatProblem::new(GoursatConfig::SideAndNormal, r1, f1, g1)?, PicardOptions::default())?;

    let sup = |f: &crate::field::TriangleField<Vector4<f64>>| f.values.iter().map(|v| v.amax()).fold(0.0, f64::max);
    let diag2 = (0..=n).map(|i| s2.k.at(i, 0).amax());
    let diag1 = (0..=n).map(|j| s1.k.at(0, j).amax());
    let diagonal_max = diag2.chain(diag1).fold(0.0, f64::max);
    let half = m / 2;
    let mut reconstruction_error = 0.0f64;
    for node in s2.k.nodes() {
        let (i, j) = (node.i, node.j);
        let direct = vectorize(kernel.k.at(half + i + j, half + i - j));
        reconstruction_error = reconstruction_error.max((s2.k.at(i, j) - direct).amax());
    }
    for node in s1.k.nodes() {
        let (i, j) = (node.i, node.j);
        let direct = vectorize(kernel.k.at(half + i - j, half - i - j));
        reconstruction_error = reconstruction_error.max((s1.k.at(i, j) - direct).amax());
    }
    Ok(ReplayReport {
        sup_omega2: sup(&s2.k),
        sup_omega1: sup(&s1.k),
        diagonal_max,
        reconstruction_error,
    })
}

/// Settings of [`uniqueness_verdict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    /// Modes used for the generating check and the comparison.
    pub modes: usize,
    /// Modes in the forward expansion producing the traces.
    pub expansion_modes: usize,
    /// Relative L² trace distance separating the two outcomes.
    pub trace_tolerance: f64,
    /// Largest `sup |K|` accepted as zero.
    pub kernel_tolerance: f64,
    pub kernel_resolution: usize,
    /// `|(a, ψ_n)|` at or below this (relative to `‖a‖`) counts as vanishing.
    pub generating_tolerance: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            modes: 4,
            expansion_modes: crate::forward::DEFAULT_MODES,
            trace_tolerance: 1e-6,
            kernel_tolerance: 1e-6,
            kernel_resolution: DEFAULT_KERNEL_RESOLUTION,
            generating_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Consistent,
    Distinct,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Consistent => "consistent with P=Q",
            VerdictKind::Distinct => "distinct (traces differ)",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of the pipeline with the evidence gathered on the way.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// `‖u_P - u_Q‖ / ‖u_P‖` in `L²` over the window, both endpoints.
    pub trace_distance: f64,
    pub trace_l2_distance: f64,
    pub generating: [GeneratingReport; 2],
    pub matches: Option<MatchReport>,
    pub kernel_boundary: Option<BoundaryReport>,
    pub replay: Option<ReplayReport>,
    /// `sup |½∫_0^x (Q - P)|` read off the replayed kernel diagonal.
    pub final_discrepancy: Option<f64>,
    pub notes: Vec<String>,
}

/// Traces of both systems from the same initial value.
pub fn system_traces(
    p: &MatrixPotential,
    q: &MatrixPotential,
    a: &VectorSpec,
    window: &TimeGrid,
    modes: usize,
) -> Result<(SpectrumTable, SpectrumTable, BoundaryTrace, BoundaryTrace)> {
    let tp = find_spectrum(&SpectralProblem::with_default_grid(p.clone())?, modes)?;
    let tq = find_spectrum(&SpectralProblem::with_default_grid(q.clone())?, modes)?;
    let grid = Grid1D::unit_default();
    let av = a.sample(&grid)?;
    let up = boundary_traces(&expand_initial(&tp, &av)?, window)?;
    let uq = boundary_traces(&expand_initial(&tq, &av)?, window)?;
    Ok((tp, tq, up, uq))
}

fn generating(table: &SpectrumTable, a: &VectorValuedField, modes: usize, tol: f64, system: &str) -> Result<GeneratingReport> {
    let mut head = table.clone();
    head.pairs.truncate(modes);
    let report = generating_element_check(&head, a, tol * a.norm().max(f64::MIN_POSITIVE))?;
    if let Some(mode) = report.first_vanishing {
        return Err(Error::Hypothesis {
            system: system.to_string(),
            mode,
            value: report.products[mode - 1],
        });
    }
    Ok(report)
}

/// Runs the full chain for `(P, Q, a)` on the observation window.
pub fn uniqueness_verdict(
    p: &MatrixPotential,
    q: &MatrixPotential,
    a: &VectorSpec,
    window: &TimeGrid,
    opts: VerdictOptions,
) -> Result<Verdict> {
    let (tp, tq, up, uq) = system_traces(p, q, a, window, opts.expansion_modes.max(opts.modes))?;
    let av = a.sample(&Grid1D::unit_default())?;
    let generating = [
        generating(&tp, &av, opts.modes, opts.generating_tolerance, "P")?,
        generating(&tq, &av, opts.modes, opts.generating_tolerance, "Q")?,
    ];
    let trace_l2_distance = up.l2_distance(&uq)?;
    let trace_distance = trace_l2_distance / up.l2_norm().max(f64::MIN_POSITIVE);
    let mut notes = Vec::new();
    if trace_distance > opts.trace_tolerance {
        let matches = match (extract_modes(&up, opts.modes), extract_modes(&uq, opts.modes)) {
            (Ok(ep), Ok(eq)) => compare_spectral_data(&ep, &eq, MatchTolerances::default()).ok(),
            (Err(e), _) | (_, Err(e)) => {
                notes.push(format!("mode extraction skipped: {e}"));
                None
            }
        };
        return Ok(Verdict {
            kind: VerdictKind::Distinct,
            trace_distance,
            trace_l2_distance,
            generating,
            matches,
            kernel_boundary: None,
            replay: None,
            final_discrepancy: None,
            notes,
        });
    }
    let ep = extract_modes(&up, opts.modes)?;
    let eq = extract_modes(&uq, opts.modes)?;
    notes.extend(ep.warnings.iter().cloned());
    let matches = compare_spectral_data(&ep, &eq, MatchTolerances::default())?;
    let kernel = build_kernel(p, q, opts.kernel_resolution)?;
    let boundary = kernel_boundary_test(&kernel, &tp)?;
    let replay = replay_propagation(&kernel)?;
    let zero = |v: f64| v <= opts.kernel_tolerance;
    let kind = if matches.matched && zero(boundary.sup_k_1y) && zero(boundary.sup_kx_1y) && zero(replay.sup_k()) {
        VerdictKind::Consistent
    } else {
        notes.push("traces agree but the kernel chain does not vanish".into());
        VerdictKind::Inconclusive
    };
    Ok(Verdict {
        kind,
        trace_distance,
        trace_l2_distance,
        generating,
        matches: Some(matches),
        kernel_boundary: Some(boundary),
        final_discrepancy: Some(replay.diagonal_max),
        replay: Some(replay),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_labels() {
        assert_eq!(VerdictKind::Consistent.to_string(), "consistent with P=Q");
        assert_eq!(VerdictKind::Distinct.to_string(), "distinct (traces differ)");
    }

    #[test]
    fn compare_scaled_amplitudes() {
        let mode = |rate: f64, s: f64| ExtractedMode {
            index: 1,
            rate,
            left: Vector2::new(0.3, -0.1) * s,
            right: Vector2::new(0.2, 0.4) * s,
            deflated_rate: rate,
        };
        let ext = |s: f64| Extraction {
            modes: vec![mode(1.0, s)],
            residual: 0.0,
            window_start: 0.01,
            warnings: vec![],
        };
        let r = compare_spectral_data(&ext(1.0), &ext(2.0), MatchTolerances::default()).unwrap();
        assert!(r.matched);
        assert!((r.modes[0].c_n - 2.0).abs() < 1e-14);
    }
}
