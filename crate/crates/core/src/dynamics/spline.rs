use serde::Serialize;

use super::banded::SymBanded;
use crate::error::{Error, Result};

/// Penalized fit `min Σ(yᵢ − f(xᵢ))² + λ∫f''²` over natural cubic splines
/// with a knot at every observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplineFit {
    pub lambda: f64,
    pub fitted: Vec<f64>,
    /// Diagonal of the smoother matrix.
    pub leverages: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Trace of the smoother matrix.
    pub edf: f64,
}

/// Maps strictly increasing abscissae onto `[0, 1]`.
pub fn normalize_x(x: &[f64]) -> Result<Vec<f64>> {
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("abscissae must be strictly increasing"));
    }
    let (lo, hi) = (x[0], x[x.len() - 1]);
    Ok(x.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// Reinsch-form operators for knots `x`: the `n × (n−2)` second-difference
/// matrix `Q` (three nonzeros per column) and the `(n−2)` tridiagonal `R`,
/// so that the roughness penalty is `fᵀ Q R⁻¹ Qᵀ f`.
struct Reinsch {
    n: usize,
    /// `q[k] = (Q[k,k], Q[k+1,k], Q[k+2,k])`
    q: Vec<[f64; 3]>,
    r_diag: Vec<f64>,
    r_off: Vec<f64>,
}

impl Reinsch {
    fn new(x: &[f64]) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m = n - 2;
        let q = (0..m)
            .map(|k| [1.0 / h[k], -1.0 / h[k] - 1.0 / h[k + 1], 1.0 / h[k + 1]])
            .collect();
        let r_diag = (0..m).map(|k| (h[k] + h[k + 1]) / 3.0).collect();
        let r_off = (0..m.saturating_sub(1)).map(|k| h[k + 1] / 6.0).collect();
        Reinsch { n, q, r_diag, r_off }
    }

    /// `Qᵀ v`
    fn qt(&self, v: &[f64]) -> Vec<f64> {
        self.q
            .iter()
            .enumerate()
            .map(|(k, c)| c[0] * v[k] + c[1] * v[k + 1] + c[2] * v[k + 2])
            .collect()
    }

    /// `Q g`
    fn q_mul(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (k, c) in self.q.iter().enumerate() {
            out[k] += c[0] * g[k];
            out[k + 1] += c[1] * g[k];
            out[k + 2] += c[2] * g[k];
        }
        out
    }

    /// `R + λ QᵀQ`, pentadiagonal.
    fn system(&self, lambda: f64) -> SymBanded {
        let m = self.q.len();
        let mut a = SymBanded::zeros(m, 2);
        for k in 0..m {
            a.add(k, k, self.r_diag[k]);
            if k + 1 < m {
                a.add(k + 1, k, self.r_off[k]);
            }
        }
        // (QᵀQ)[k,l] = Σ_i Q[i,k] Q[i,l]; columns overlap only for |k−l| ≤ 2
        for k in 0..m {
            for l in k..(k + 3).min(m) {
                let mut s = 0.0;
                for i in l..=(k + 2) {
                    s += self.q[k][i - k] * self.q[l][i - l];
                }
                a.add(l, k, lambda * s);
            }
        }
        a
    }
}

pub fn fit_smoothing_spline(x: &[f64], y: &[f64], lambda: f64) -> Result<SplineFit> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::invalid("x and y lengths differ"));
    }
    if n < 4 {
        return Err(Error::invalid(format!("spline fitting needs n ≥ 4, got {n}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite response value"));
    }
    let xs = normalize_x(x)?;
    let ops = Reinsch::new(&xs);
    let ldl = ops.system(lambda).factor()?;

    let mut gamma = ops.qt(y);
    ldl.solve_in_place(&mut gamma);
    let qg = ops.q_mul(&gamma);
    let fitted: Vec<f64> = y.iter().zip(&qg).map(|(yi, g)| yi - lambda * g).collect();

    // S = I − λ Q (R + λQᵀQ)⁻¹ Qᵀ; column i of Qᵀ has at most three nonzeros
    let m = n - 2;
    let mut leverages = Vec::with_capacity(n);
    let mut rhs = vec![0.0; m];
    for i in 0..n {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        let ks = i.saturating_sub(2)..(i + 1).min(m);
        for k in ks.clone() {
            rhs[k] = ops.q[k][i - k];
        }
        let col = rhs.clone();
        ldl.solve_in_place(&mut rhs);
        let quad: f64 = ks.map(|k| col[k] * rhs[k]).sum();
        leverages.push(1.0 - lambda * quad);
    }

    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    let edf = leverages.iter().sum();
    Ok(SplineFit {
        lambda,
        fitted,
        leverages,
        residuals,
        rss,
        edf,
    })
}

/// Fit on equally spaced abscissae `0, 1, …, n−1`.
pub fn fit_series(y: &[f64], lambda: f64) -> Result<SplineFit> {
    let x: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
    fit_smoothing_spline(&x, y, lambda)
}
