use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::spline::SplineFit;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CooksDistances {
    /// `+∞` where the leverage reached 1.
    pub values: Vec<f64>,
    pub infinite_influence: Vec<usize>,
}

/// Approximate Cook's distance for a linear smoother:
/// `Dᵢ = rᵢ² hᵢᵢ / (edf · σ̂² · (1 − hᵢᵢ)²)` with `σ̂² = RSS / (n − edf)`.
pub fn cooks_distance(fit: &SplineFit) -> CooksDistances {
    let n = fit.fitted.len() as f64;
    let sigma2 = if n > fit.edf { fit.rss / (n - fit.edf) } else { 0.0 };
    let mut infinite_influence = Vec::new();
    let values = fit
        .residuals
        .iter()
        .zip(&fit.leverages)
        .enumerate()
        .map(|(i, (&r, &h))| {
            if h >= 1.0 {
                infinite_influence.push(i);
                return f64::INFINITY;
            }
            if r == 0.0 || sigma2 <= 0.0 {
                return 0.0;
            }
            r * r * h / (fit.edf * sigma2 * (1.0 - h) * (1.0 - h))
        })
        .collect();
    CooksDistances {
        values,
        infinite_influence,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum OutlierRule {
    /// `Dᵢ > c`; `None` means `4/n`.
    Threshold(Option<f64>),
    TopK(usize),
}

impl Default for OutlierRule {
    fn default() -> Self {
        OutlierRule::Threshold(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outlier {
    pub index: usize,
    pub date: Option<NaiveDate>,
    pub cooks_d: f64,
}

/// Flagged observations sorted by distance, largest first (ties by index).
pub fn detect_outliers(d: &CooksDistances, dates: Option<&[NaiveDate]>, rule: OutlierRule) -> Vec<Outlier> {
    let n = d.values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d.values[b].total_cmp(&d.values[a]).then(a.cmp(&b)));
    let keep: Vec<usize> = match rule {
        OutlierRule::Threshold(c) => {
            let c = c.unwrap_or(4.0 / n as f64);
            idx.into_iter().filter(|&i| d.values[i] > c).collect()
        }
        OutlierRule::TopK(k) => idx
            .into_iter()
            .filter(|&i| d.values[i] > 0.0)
            .take(k)
            .collect(),
    };
    keep.into_iter()
        .map(|i| Outlier {
            index: i,
            date: dates.map(|ds| ds[i]),
            cooks_d: d.values[i],
        })
        .collect()
}
