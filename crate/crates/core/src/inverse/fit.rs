//! Exponential-sum fitting by variable projection.
//!
//! The model is `Y(t) ≈ Σ_n A_n e^{-λ_n t}` with a shared rate per mode
//! across all channels. For fixed rates the amplitudes are a linear least
//! squares solve; the rates are found by Levenberg–Marquardt on the projected
//! residual, using Kaufman's approximation of its Jacobian.

use nalgebra::{DMatrix, DVector};

/// Fitted rates and amplitudes (`amplitudes[(n, c)]` for mode `n`, channel `c`).
#[derive(Debug, Clone)]
pub struct ExpFit {
    pub rates: Vec<f64>,
    pub amplitudes: DMatrix<f64>,
    /// `max |Y - model| / max |Y|`.
    pub relative_residual: f64,
}

fn design(times: &[f64], rates: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(times.len(), rates.len(), |i, k| (-rates[k] * times[i]).exp())
}

// Least squares with unit-norm columns; returns (amplitudes, residual).
fn project(e: &DMatrix<f64>, y: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let norms: Vec<f64> = e.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return None;
    }
    let mut scaled = e.clone();
    for (k, n) in norms.iter().enumerate() {
        scaled.column_mut(k).scale_mut(1.0 / n);
    }
    let svd = scaled.svd(true, true);
    let mut a = svd.solve(y, 1e-15).ok()?;
    for (k, n) in norms.iter().enumerate() {
        a.row_mut(k).scale_mut(1.0 / n);
    }
    let r = y - e * &a;
    Some((a, r))
}

fn cost(times: &[f64], y: &DMatrix<f64>, rates: &[f64]) -> Option<(f64, DMatrix<f64>, DMatrix<f64>)> {
    if rates.iter().any(|r| !r.is_finite()) {
        return None;
    }
    let e = design(times, rates);
    let (a, r) = project(&e, y)?;
    Some((r.norm_squared(), a, r))
}

/// Solves for amplitudes at fixed rates.
pub fn amplitudes_for(times: &[f64], y: &DMatrix<f64>, rates: &[f64]) -> Option<ExpFit> {
    let (_, a, r) = cost(times, y, rates)?;
    Some(ExpFit {
        rates: rates.to_vec(),
        amplitudes: a,
        relative_residual: relative(&r, y),
    })
}

fn relative(r: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let scale = y.amax();
    if scale == 0.0 {
        r.amax()
    } else {
        r.amax() / scale
    }
}

/// Levenberg–Marquardt refinement of all rates jointly from `init`.
pub fn varpro(times: &[f64], y: &DMatrix<f64>, init: &[f64], max_iter: usize) -> Option<ExpFit> {
    let m = init.len();
    let t = times.len();
    let c = y.ncols();
    let mut rates = init.to_vec();
    let (mut f, mut a, mut r) = cost(times, y, &rates)?;
    let mut mu: Option<f64> = None;
    for _ in 0..max_iter {
        if f == 0.0 {
            break;
        }
        let e = design(times, &rates);
        // J[:, k] = P⊥ (∂E/∂λ_k) A, stacked over channels.
        let mut jac = DMatrix::zeros(t * c, m);
        for k in 0..m {
            let dcol = DVector::from_fn(t, |i, _| -times[i] * e[(i, k)]);
            let mut block = DMatrix::zeros(t, c);
            for ch in 0..c {
                block.set_column(ch, &(&dcol * a[(k, ch)]));
            }
            let (_, proj) = project(&e, &block)?;
            for ch in 0..c {
                for i in 0..t {
                    jac[(ch * t + i, k)] = -proj[(i, ch)];
                }
            }
        }
        let rv = DVector::from_iterator(t * c, r.iter().copied());
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &rv;
        let diag: Vec<f64> = (0..m).map(|k| jtj[(k, k)].max(1e-300)).collect();
        let mut lambda_lm = mu.unwrap_or_else(|| 1e-3 * diag.iter().cloned().fold(0.0, f64::max));
        let mut accepted = false;
        for _ in 0..40 {
            let mut lhs = jtj.clone();
            for k in 0..m {
                lhs[(k, k)] += lambda_lm * diag[k];
            }
            let Some(step) = lhs.clone().cholesky().map(|ch| ch.solve(&(-&g))) else {
                lambda_lm *= 4.0;
                continue;
            };
            let trial: Vec<f64> = rates.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
            if let Some((ft, at, rt)) = cost(times, y, &trial) {
                if ft < f {
                    let small = step
                        .iter()
                        .zip(&rates)
                        .all(|(d, x)| d.abs() <= 1e-14 * x.abs().max(1.0));
                    let stalled = f - ft <= 1e-15 * f;
                    rates = trial;
                    f = ft;
                    a = at;
                    r = rt;
                    lambda_lm /= 3.0;
                    accepted = true;
                    if small || stalled {
                        return Some(finish(rates, a, &r, y));
                    }
                    break;
                }
            }
            lambda_lm *= 4.0;
        }
        mu = Some(lambda_lm);
        if !accepted {
            break;
        }
    }
    Some(finish(rates, a, &r, y))
}

fn finish(rates: Vec<f64>, a: DMatrix<f64>, r: &DMatrix<f64>, y: &DMatrix<f64>) -> ExpFit {
    // Sort modes by rate.
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&i, &j| rates[i].total_cmp(&rates[j]));
    let amplitudes = DMatrix::from_fn(rates.len(), a.ncols(), |k, ch| a[(order[k], ch)]);
    ExpFit {
        rates: order.iter().map(|&k| rates[k]).collect(),
        amplitudes,
        relative_residual: relative(r, y),
    }
}

/// Initial rates by peeling: the slowest remaining mode dominates the late
/// part of the residual, so it is fitted alone there and subtracted.
pub fn peel(times: &[f64], y: &DMatrix<f64>, m: usize) -> Option<Vec<f64>> {
    let t = times.len();
    let floor = 1e-12 * y.amax();
    let mut resid = y.clone();
    let mut rates = Vec::with_capacity(m);
    for _ in 0..m {
        let size: Vec<f64> = (0..t).map(|i| resid.row(i).amax()).collect();
        let end = (0..t).rev().find(|&i| size[i] > 1e3 * floor)?;
        // Late window: the last third of the resolved span, at least 10 samples.
        let t_lo = times[end] - (times[end] - times[0]) / 3.0;
        let mut start = (0..=end).find(|&i| times[i] >= t_lo).unwrap_or(0);
        start = start.min(end.saturating_sub(9));
        let ts = &times[start..=end];
        let ys = resid.rows(start, end - start + 1).into_owned();
        let (a, b) = (start, end);
        let guess = if size[a] > 0.0 && size[b] > 0.0 && times[b] > times[a] {
            ((size[a] / size[b]).ln() / (times[b] - times[a])).max(1e-3)
        } else {
            1.0
        };
        let single = varpro(ts, &ys, &[guess], 100)?;
        let rate = single.rates[0];
        let e = design(times, &[rate]);
        let (amp, _) = project(&e.rows(start, end - start + 1).into_owned(), &ys)?;
        resid -= &e * amp;
        rates.push(rate);
    }
    // Keep rates distinct so the design matrix stays full rank.
    rates.sort_by(|a, b| a.total_cmp(b));
    for k in 1..rates.len() {
        if rates[k] - rates[k - 1] < 1e-3 * rates[k - 1].abs().max(1.0) {
            rates[k] = rates[k - 1] + 0.5 * rates[k - 1].abs().max(1.0);
        }
    }
    Some(rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(times: &[f64], rates: &[f64], amps: &[[f64; 2]]) -> DMatrix<f64> {
        DMatrix::from_fn(times.len(), 2, |i, c| {
            rates.iter().zip(amps).map(|(r, a)| a[c] * (-r * times[i]).exp()).sum()
        })
    }

    fn log_times(n: usize) -> Vec<f64> {
        (0..n).map(|i| 0.01 * 300f64.powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn two_modes_exact() {
        let times = log_times(600);
        let y = synth(&times, &[1.3, 9.1], &[[0.7, 0.0], [0.0, 0.2]]);
        let init = peel(&times, &y, 2).unwrap();
        let fit = varpro(&times, &y, &init, 200).unwrap();
        assert!((fit.rates[0] - 1.3).abs() < 1e-9 && (fit.rates[1] - 9.1).abs() < 1e-9, "{:?}", fit.rates);
        assert!((fit.amplitudes[(0, 0)] - 0.7).abs() < 1e-9);
        assert!((fit.amplitudes[(1, 1)] - 0.2).abs() < 1e-9);
        assert!(fit.relative_residual < 1e-12);
    }

    #[test]
    fn fixed_rate_amplitudes() {
        let times = log_times(50);
        let y = synth(&times, &[2.0], &[[3.0, -1.0]]);
        let fit = amplitudes_for(&times, &y, &[2.0]).unwrap();
        assert!((fit.amplitudes[(0, 0)] - 3.0).abs() < 1e-12);
        assert!((fit.amplitudes[(0, 1)] + 1.0).abs() < 1e-12);
    }
}
