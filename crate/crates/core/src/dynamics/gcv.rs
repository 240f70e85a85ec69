use serde::Serialize;

use super::spline::{fit_smoothing_spline, SplineFit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcvPoint {
    pub lambda: f64,
    pub gcv: f64,
    pub edf: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcvSelection {
    pub lambda_star: f64,
    pub curve: Vec<GcvPoint>,
    /// Grid values skipped because the fit interpolated (`edf = n`).
    pub skipped: Vec<f64>,
    #[serde(skip)]
    pub best_fit: SplineFit,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    grid
}

pub fn default_grid() -> Vec<f64> {
    log_grid(1e-6, 1e3, 40)
}

pub fn gcv_score(fit: &SplineFit) -> Option<f64> {
    let n = fit.fitted.len() as f64;
    let denom = n - fit.edf;
    (denom > 1e-9 * n).then(|| n * fit.rss / (denom * denom))
}

/// Minimizes `GCV(λ) = n·RSS(λ) / (n − edf(λ))²` over `grid`. Ties go to the
/// larger λ.
pub fn select_lambda_gcv(x: &[f64], y: &[f64], grid: &[f64]) -> Result<GcvSelection> {
    if grid.len() < 2 {
        return Err(Error::invalid("GCV grid needs at least two values"));
    }
    let mut curve = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    let mut best: Option<(f64, SplineFit)> = None;
    for &lambda in grid {
        let fit = fit_smoothing_spline(x, y, lambda)?;
        let Some(g) = gcv_score(&fit) else {
            skipped.push(lambda);
            continue;
        };
        curve.push(GcvPoint {
            lambda,
            gcv: g,
            edf: fit.edf,
            rss: fit.rss,
        });
        let better = match &best {
            None => true,
            Some((bg, bf)) => g < *bg || (g == *bg && lambda > bf.lambda),
        };
        if better {
            best = Some((g, fit));
        }
    }
    let (_, best_fit) =
        best.ok_or_else(|| Error::invalid("every grid value produced an interpolating fit"))?;
    Ok(GcvSelection {
        lambda_star: best_fit.lambda,
        curve,
        skipped,
        best_fit,
    })
}
