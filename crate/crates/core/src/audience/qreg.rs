//! Linear quantile regression `y ≈ β₀ + β₁x` under the check loss
//! `ρ_τ(u) = u(τ − 1[u<0])`.
//!
//! The solver warm-starts with iteratively reweighted least squares on a
//! smoothed check loss, then walks exact vertices of the piecewise-linear
//! objective: from the current line it tries pivoting about each
//! zero-residual observation and re-solving the intercept, each move being an
//! exact one-dimensional minimization, until no move improves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TAUS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

pub fn check_loss(u: f64, tau: f64) -> f64 {
    if u < 0.0 {
        u * (tau - 1.0)
    } else {
        u * tau
    }
}

pub fn objective(x: &[f64], y: &[f64], tau: f64, beta0: f64, beta1: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| check_loss(yi - beta0 - beta1 * xi, tau))
        .sum()
}

/// Exact minimizer of `b ↦ Σ ρ_τ(aⱼ − b·cⱼ)`; terms with `cⱼ = 0` are constant.
fn line_minimizer(a: &[f64], c: &[f64], tau: f64) -> Option<f64> {
    let mut bps: Vec<(f64, f64)> = a
        .iter()
        .zip(c)
        .filter(|(_, &cj)| cj != 0.0)
        .map(|(&aj, &cj)| (aj / cj, cj.abs()))
        .collect();
    if bps.is_empty() {
        return None;
    }
    bps.sort_by(|p, q| p.0.total_cmp(&q.0));
    // slope at −∞; each breakpoint raises it by |cⱼ|
    let mut slope: f64 = -c
        .iter()
        .map(|&cj| {
            if cj > 0.0 {
                tau * cj
            } else {
                (1.0 - tau) * -cj
            }
        })
        .sum::<f64>();
    for (t, w) in &bps {
        slope += w;
        if slope >= 0.0 {
            return Some(*t);
        }
    }
    bps.last().map(|b| b.0)
}

fn irls_start(x: &[f64], y: &[f64], tau: f64) -> (f64, f64) {
    let n = x.len();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut w = vec![1.0; n];
    let (mut b0, mut b1) = (0.0, 0.0);
    let mut eps = 1e-2 * scale;
    for _ in 0..60 {
        let sw: f64 = w.iter().sum();
        let mx = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / sw;
        let my = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sw;
        let sxx: f64 = (0..n).map(|i| w[i] * (x[i] - mx) * (x[i] - mx)).sum();
        let sxy: f64 = (0..n).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
        if sxx <= 0.0 {
            break;
        }
        b1 = sxy / sxx;
        b0 = my - b1 * mx;
        for i in 0..n {
            let r = y[i] - b0 - b1 * x[i];
            let side = if r >= 0.0 { tau } else { 1.0 - tau };
            w[i] = side / r.abs().max(eps);
        }
        eps = (eps * 0.5).max(1e-6 * scale);
    }
    (b0, b1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileLine {
    pub tau: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub objective: f64,
}

fn validate(x: &[f64], y: &[f64], tau: f64) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y lengths differ"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("τ = {tau} outside (0,1)")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite observation"));
    }
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::invalid("degenerate regressor: x is constant"));
    }
    Ok(())
}

/// Exact check-loss line fit.
pub fn fit_quantile_line(x: &[f64], y: &[f64], tau: f64) -> Result<QuantileLine> {
    validate(x, y, tau)?;
    let n = x.len();
    let scale = y.iter().chain(x).fold(1.0f64, |m, v| m.max(v.abs()));
    let zero_tol = 1e-9 * scale;

    let (_, mut b1) = irls_start(x, y, tau);
    let ones = vec![1.0; n];
    let intercept_for = |b1: f64| {
        let a: Vec<f64> = (0..n).map(|i| y[i] - b1 * x[i]).collect();
        line_minimizer(&a, &ones, tau).expect("nonempty")
    };
    let mut b0 = intercept_for(b1);
    let mut obj = objective(x, y, tau, b0, b1);

    let mut a = vec![0.0; n];
    let mut c = vec![0.0; n];
    for _ in 0..(20 * n + 100) {
        let mut improved = false;
        let cand0 = intercept_for(b1);
        let o = objective(x, y, tau, cand0, b1);
        if o < obj - 1e-13 * obj.abs().max(1.0) {
            b0 = cand0;
            obj = o;
            improved = true;
        }
        if !improved {
            for k in 0..n {
                if (y[k] - b0 - b1 * x[k]).abs() > zero_tol {
                    continue;
                }
                for j in 0..n {
                    a[j] = y[j] - y[k];
                    c[j] = x[j] - x[k];
                }
                let Some(nb1) = line_minimizer(&a, &c, tau) else {
                    continue;
                };
                let nb0 = y[k] - nb1 * x[k];
                let o = objective(x, y, tau, nb0, nb1);
                if o < obj - 1e-13 * obj.abs().max(1.0) {
                    b0 = nb0;
                    b1 = nb1;
                    obj = o;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok(QuantileLine {
        tau,
        beta0: b0,
        beta1: b1,
        objective: obj,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileFit {
    pub tau: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub objective: f64,
    /// Bootstrap 95% percentile intervals.
    pub beta0_ci: Interval,
    pub beta1_ci: Interval,
    /// Two-sided bootstrap p-values for `β = 0`.
    pub beta0_p: f64,
    pub beta1_p: f64,
    pub replicates: usize,
}

fn percentile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

fn two_sided_p(draws: &[f64]) -> f64 {
    let b = draws.len() as f64;
    let le = draws.iter().filter(|&&d| d <= 0.0).count() as f64;
    let ge = draws.iter().filter(|&&d| d >= 0.0).count() as f64;
    (2.0 * le.min(ge) / b).min(1.0)
}

/// Fits each τ and attaches pairs-bootstrap percentile intervals and p-values
/// from `bootstrap` resamples; replicate `r` draws from stream `r` of a
/// generator seeded with `seed`.
pub fn quantile_regression(
    x: &[f64],
    y: &[f64],
    taus: &[f64],
    bootstrap: usize,
    seed: u64,
) -> Result<Vec<QuantileFit>> {
    if x.len() < 10 {
        return Err(Error::invalid(format!(
            "quantile regression needs n ≥ 10, got {}",
            x.len()
        )));
    }
    for &tau in taus {
        validate(x, y, tau)?;
    }
    let n = x.len();
    let draws: Vec<Vec<(f64, f64)>> = (0..bootstrap)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let (xs, ys) = loop {
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
                if xs.windows(2).any(|w| w[0] != w[1]) {
                    break (xs, idx.iter().map(|&i| y[i]).collect::<Vec<f64>>());
                }
            };
            taus.iter()
                .map(|&t| {
                    let l = fit_quantile_line(&xs, &ys, t).expect("validated resample");
                    (l.beta0, l.beta1)
                })
                .collect()
        })
        .collect();

    taus.iter()
        .enumerate()
        .map(|(ti, &tau)| {
            let line = fit_quantile_line(x, y, tau)?;
            let mut b0: Vec<f64> = draws.iter().map(|d| d[ti].0).collect();
            let mut b1: Vec<f64> = draws.iter().map(|d| d[ti].1).collect();
            let (beta0_p, beta1_p) = if bootstrap > 0 {
                (two_sided_p(&b0), two_sided_p(&b1))
            } else {
                (f64::NAN, f64::NAN)
            };
            b0.sort_by(f64::total_cmp);
            b1.sort_by(f64::total_cmp);
            let ci = |v: &[f64]| {
                if v.is_empty() {
                    Interval {
                        low: f64::NAN,
                        high: f64::NAN,
                    }
                } else {
                    Interval {
                        low: percentile_sorted(v, 0.025),
                        high: percentile_sorted(v, 0.975),
                    }
                }
            };
            Ok(QuantileFit {
                tau,
                beta0: line.beta0,
                beta1: line.beta1,
                objective: line.objective,
                beta0_ci: ci(&b0),
                beta1_ci: ci(&b1),
                beta0_p,
                beta1_p,
                replicates: bootstrap,
            })
        })
        .collect()
}
