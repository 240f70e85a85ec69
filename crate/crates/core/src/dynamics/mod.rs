//! Daily incivility series, smoothing-spline trends (fixed λ and
//! GCV-selected λ) and Cook's-distance outlier days.

mod banded;
mod gcv;
mod influence;
mod series;
mod spline;

use serde::Serialize;

pub use gcv::{default_grid, gcv_score, log_grid, select_lambda_gcv, GcvPoint, GcvSelection};
pub use influence::{cooks_distance, detect_outliers, CooksDistances, Outlier, OutlierRule};
pub use series::{build_daily_series, DailySeries};
pub use spline::{fit_series, fit_smoothing_spline, normalize_x, SplineFit};

use crate::error::Result;

/// Smoothing parameter for the trend view, on abscissae normalized to `[0,1]`.
pub const DEFAULT_TREND_LAMBDA: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsResult {
    pub series: DailySeries,
    pub trend: SplineFit,
    pub gcv: GcvSelection,
    pub gcv_fit: SplineFit,
    pub cooks: CooksDistances,
    pub outliers: Vec<Outlier>,
}

/// Trend fit at `trend_lambda`, GCV fit over `grid`, and outliers of the GCV fit.
pub fn analyze_series(
    series: DailySeries,
    trend_lambda: f64,
    grid: &[f64],
    rule: OutlierRule,
) -> Result<DynamicsResult> {
    let y = series.values();
    let x: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
    let trend = fit_smoothing_spline(&x, &y, trend_lambda)?;
    let gcv = select_lambda_gcv(&x, &y, grid)?;
    let gcv_fit = gcv.best_fit.clone();
    let cooks = cooks_distance(&gcv_fit);
    let outliers = detect_outliers(&cooks, Some(&series.dates), rule);
    Ok(DynamicsResult {
        series,
        trend,
        gcv,
        gcv_fit,
        cooks,
        outliers,
    })
}
