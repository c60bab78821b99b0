//! Executes one experiment and writes its artifacts.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{Matrix4, Vector2, Vector4};
use serde_json::{json, Value};

use glparab_core::corpus::list_corpus;
use glparab_core::field::{Grid1D, TriangleField};
use glparab_core::forward::{boundary_traces, expand_initial, TimeGrid};
use glparab_core::goursat::{corpus_problems, picard_solve, GoursatConfig, GoursatProblem, PicardOptions};
use glparab_core::inverse::{uniqueness_verdict, VerdictOptions};
use glparab_core::kernel::{build_kernel, transform_pair};
use glparab_core::spectral::{find_spectrum, SpectralProblem};

use crate::config::{effective_config_path, expect_header, ExperimentConfig};
use crate::io::{read_csv, write_csv, write_json, write_text};

/// Runs `cfg`, writes outputs and the effective config, and returns
/// human-readable summary lines.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let summary = match cfg {
        ExperimentConfig::Spectrum { potential, count, grid_points, out } => {
            let grid = Grid1D::new(0.0, 1.0, *grid_points)?;
            let problem = SpectralProblem::new(potential.load()?, grid)?;
            let table = find_spectrum(&problem, *count)?;
            let rows = table.pairs.iter().map(|p| {
                vec![
                    p.index as f64,
                    p.lambda,
                    p.rho,
                    p.endpoint0[0],
                    p.endpoint0[1],
                    p.endpoint1[0],
                    p.endpoint1[1],
                ]
            });
            write_csv(out, &["n", "lambda", "rho", "b1", "b2", "psi1_at_1", "psi2_at_1"], rows)?;
            vec![format!("{} eigenvalues written to {}", table.len(), out.display())]
        }
        ExperimentConfig::Forward { potential, initial, times, modes, out } => {
            let times: TimeGrid = times.parse()?;
            let table = find_spectrum(&SpectralProblem::with_default_grid(potential.load()?)?, *modes)?;
            let a = initial.load()?.sample(&Grid1D::unit_default())?;
            let trace = boundary_traces(&expand_initial(&table, &a)?, &times)?;
            let rows = (0..trace.len()).map(|k| {
                let c = trace.channels(k);
                vec![trace.times[k], c[0], c[1], c[2], c[3]]
            });
            write_csv(out, &["t", "u1_left", "u2_left", "u1_right", "u2_right"], rows)?;
            vec![format!("{} trace samples written to {}", trace.len(), out.display())]
        }
        ExperimentConfig::Goursat {
            layout,
            problem,
            resolution,
            rhs,
            f,
            g,
            tolerance,
            max_iterations,
            out,
            report,
        } => {
            let config: GoursatConfig = layout.parse()?;
            let gp = match problem {
                Some(name) => {
                    let found = corpus_problems(*resolution)?
                        .into_iter()
                        .find(|c| c.name == name.as_str())
                        .ok_or_else(|| anyhow!("no built-in Goursat problem named '{name}'"))?;
                    if config != GoursatConfig::TwoSides {
                        bail!("built-in Goursat problems use the prop1 layout");
                    }
                    found.problem
                }
                None => read_goursat(
                    config,
                    rhs.as_deref().expect("validated"),
                    f.as_deref().expect("validated"),
                    g.as_deref().expect("validated"),
                )?,
            };
            let opts = PicardOptions {
                tolerance: *tolerance,
                max_iterations: *max_iterations,
            };
            let sol = picard_solve(&gp, opts)?;
            let rows = sol.k.nodes().iter().zip(&sol.k.values).map(|(n, v)| vec![n.x, n.y, v[0], v[1], v[2], v[3]]);
            write_csv(out, &["X", "Y", "k1", "k2", "k3", "k4"], rows)?;
            let b = sol.bounds();
            write_json(
                report,
                &json!({
                    "iterations": sol.iterations,
                    "increments": sol.increments,
                    "M": b.m,
                    "c0": b.c0,
                    "c0_bound": b.c0_bound,
                    "c0_bound_ok": b.c0_ok,
                    "c2": b.c2,
                    "c2_bound": b.c2_bound,
                    "c2_bound_ok": b.c2_ok,
                    "picard_certificate_ok": b.picard_ok,
                }),
            )?;
            vec![format!(
                "{} nodes, {} iterations, M = {}, C0 bound {}, C2 bound {}",
                sol.k.len(),
                sol.iterations,
                b.m,
                ok(b.c0_ok),
                ok(b.c2_ok)
            )]
        }
        ExperimentConfig::Kernel { p, q, resolution, out, checks } => {
            let kernel = build_kernel(&p.load()?, &q.load()?, *resolution)?;
            let rows = kernel.k.nodes().iter().zip(&kernel.k.values).map(|(n, k)| {
                vec![n.x, n.y, k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)]]
            });
            write_csv(out, &["x", "y", "K11", "K12", "K21", "K22"], rows)?;
            let c = kernel.checks()?;
            write_json(
                checks,
                &json!({
                    "trace_error": c.trace_error,
                    "normal_error": c.normal_error,
                    "pde_residual": c.pde_residual,
                    "sup_K": c.sup_k,
                    "asymmetry": c.asymmetry,
                    "iterations": kernel.iterations,
                }),
            )?;
            vec![format!(
                "kernel on {} nodes: trace {:e}, normal {:e}, PDE residual {:e}",
                kernel.k.len(),
                c.trace_error,
                c.normal_error,
                c.pde_residual
            )]
        }
        ExperimentConfig::Transform { p, q, resolution, lambda, xi, out } => {
            let kernel = build_kernel(&p.load()?, &q.load()?, *resolution)?;
            let grid = Grid1D::new(0.0, 1.0, resolution + 1)?;
            let problem = SpectralProblem::new(kernel.p.clone(), grid)?;
            let (psi, dpsi) = problem.fundamental_matrix(*lambda)?.apply(&Vector2::new(xi[0], xi[1]));
            let t = transform_pair(&kernel, &psi, &dpsi, *lambda)?;
            let rows = t.phi.grid.points().iter().enumerate().map(|(k, x)| {
                let (v, d) = (t.phi.values[k], t.dphi.values[k]);
                vec![*x, v[0], v[1], d[0], d[1]]
            });
            write_csv(out, &["x", "phi1", "phi2", "dphi1", "dphi2"], rows)?;
            vec![format!("transformed solution at lambda = {lambda}: Q-equation residual {:e}", t.residual)]
        }
        ExperimentConfig::Verify {
            p,
            q,
            initial,
            window,
            samples,
            modes,
            expansion_modes,
            trace_tolerance,
            kernel_tolerance,
            resolution,
            out,
        } => {
            let times = parse_window(window, *samples)?;
            let opts = VerdictOptions {
                modes: *modes,
                expansion_modes: *expansion_modes,
                trace_tolerance: *trace_tolerance,
                kernel_tolerance: *kernel_tolerance,
                kernel_resolution: *resolution,
                ..VerdictOptions::default()
            };
            let v = uniqueness_verdict(&p.load()?, &q.load()?, &initial.load()?, &times, opts)?;
            let modes_json: Vec<Value> = v
                .matches
                .iter()
                .flat_map(|m| &m.modes)
                .map(|m| {
                    json!({
                        "index": m.index,
                        "lambda_p": m.lambda_p,
                        "lambda_q": m.lambda_q,
                        "rate_diff": m.rate_diff,
                        "c_n": m.c_n,
                        "residuals": {"left": m.left_residual, "right": m.right_residual},
                    })
                })
                .collect();
            let boundary = v.kernel_boundary.as_ref().map(|b| {
                json!({
                    "sup_K_1y": b.sup_k_1y,
                    "sup_Kx_1y": b.sup_kx_1y,
                    "moments": b.moments.iter().map(|m| vec![m[0], m[1]]).collect::<Vec<_>>(),
                    "projection_constant": b.projection_constant,
                })
            });
            let replay = v.replay.as_ref().map(|r| {
                json!({
                    "sup_omega1": r.sup_omega1,
                    "sup_omega2": r.sup_omega2,
                    "diagonal_max": r.diagonal_max,
                    "reconstruction_error": r.reconstruction_error,
                })
            });
            write_json(
                out,
                &json!({
                    "verdict": v.kind.to_string(),
                    "trace_distance": v.trace_distance,
                    "trace_l2_distance": v.trace_l2_distance,
                    "modes": modes_json,
                    "kernel_boundary": boundary,
                    "replay": replay,
                    "final_discrepancy": v.final_discrepancy,
                    "notes": v.notes,
                }),
            )?;
            vec![format!("verdict: {} (relative trace distance {:e})", v.kind, v.trace_distance)]
        }
        ExperimentConfig::Corpus { out } => {
            let lines = list_corpus();
            if let Some(out) = out {
                write_text(out, &(lines.join("\n") + "\n"))?;
            }
            lines
        }
    };
    if let Some(out) = cfg.primary_output() {
        write_text(&effective_config_path(out), &cfg.to_toml()?)?;
    }
    Ok(summary)
}

fn ok(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "FAILS"
    }
}

/// `a:b` (log-spaced with `samples` points) or any [`TimeGrid`] spec.
pub fn parse_window(window: &str, samples: usize) -> Result<TimeGrid> {
    let parts: Vec<&str> = window.split(':').collect();
    if parts.len() == 2 {
        let a: f64 = parts[0].trim().parse().with_context(|| format!("window start in '{window}'"))?;
        let b: f64 = parts[1].trim().parse().with_context(|| format!("window end in '{window}'"))?;
        return Ok(TimeGrid::log_spaced(a, b, samples)?);
    }
    Ok(window.parse()?)
}

fn read_goursat(config: GoursatConfig, rhs: &Path, f: &Path, g: &Path) -> Result<GoursatProblem> {
    let data = |path: &Path| -> Result<Vec<Vector4<f64>>> {
        let (header, rows) = read_csv(path)?;
        expect_header(path, &header, &["s", "f1", "f2", "f3", "f4"])?;
        Ok(rows.iter().map(|r| Vector4::new(r[1], r[2], r[3], r[4])).collect())
    };
    let fv = data(f)?;
    let gv = data(g)?;
    let n = fv.len() - 1;
    let (header, rows) = read_csv(rhs)?;
    let mut want = vec!["X".to_string(), "Y".to_string()];
    for a in 1..=4 {
        for b in 1..=4 {
            want.push(format!("r{a}{b}"));
        }
    }
    let want: Vec<&str> = want.iter().map(String::as_str).collect();
    expect_header(rhs, &header, &want)?;
    let mut by_node = HashMap::new();
    for r in &rows {
        let key = ((r[0] * n as f64).round() as i64, (r[1] * n as f64).round() as i64);
        by_node.insert(key, Matrix4::from_row_slice(&r[2..18]));
    }
    let mut missing = None;
    let field = TriangleField::from_fn(config.domain(), n, |node| {
        by_node.get(&(node.i as i64, node.j as i64)).copied().unwrap_or_else(|| {
            missing.get_or_insert((node.x, node.y));
            Matrix4::zeros()
        })
    })?;
    if let Some((x, y)) = missing {
        bail!("{}: no R value for lattice node ({x}, {y}) at resolution {n}", rhs.display());
    }
    Ok(GoursatProblem::new(config, field, fv, gv)?)
}
