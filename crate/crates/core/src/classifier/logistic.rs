use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub l2: f64,
    /// Fixed step size; `None` uses `1/L` for the loss's smoothness bound `L`.
    pub lr: Option<f64>,
    pub max_iter: usize,
    /// Stop once the gradient's infinity norm falls below this.
    pub tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 1e-3,
            lr: None,
            max_iter: 2000,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2: f64,
    pub seed: u64,
    pub iterations: usize,
    pub final_loss: f64,
    pub converged: bool,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticModel {
    pub fn zeros(dim: usize, l2: f64, seed: u64) -> Self {
        LogisticModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            l2,
            seed,
            iterations: 0,
            final_loss: f64::NAN,
            converged: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }
}

/// Mean logistic loss plus `(l2/2)‖w‖²` and its gradient `(∂w, ∂b)`.
pub fn loss_and_gradient(
    x: &[Vec<f64>],
    y: &[bool],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = bias + weights.iter().zip(xi).map(|(w, v)| w * v).sum::<f64>();
        let t = if yi { 1.0 } else { 0.0 };
        // -[t ln σ(z) + (1-t) ln(1-σ(z))] = softplus(z) - t z
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, v) in gw.iter_mut().zip(xi) {
            *g += r * v;
        }
        gb += r;
    }
    let sq: f64 = weights.iter().map(|w| w * w).sum();
    loss = loss / n + 0.5 * l2 * sq;
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (loss, gw, gb / n)
}

pub(crate) fn validate_training_set(x: &[Vec<f64>], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "{} feature rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid("training needs at least two samples"));
    }
    let pos = y.iter().filter(|&&v| v).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::invalid("training set contains a single class"));
    }
    let dim = x[0].len();
    for row in x {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
                id: "<feature row>".into(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite feature value"));
        }
    }
    Ok(dim)
}

/// Upper bound on the Lipschitz constant of the loss gradient.
fn smoothness_bound(x: &[Vec<f64>], l2: f64) -> f64 {
    let mean_sq = x
        .iter()
        .map(|r| 1.0 + r.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / x.len() as f64;
    0.25 * mean_sq + l2
}

/// Full-batch gradient descent from zero weights.
pub fn train_logistic(x: &[Vec<f64>], y: &[bool], cfg: &TrainConfig, seed: u64) -> Result<LogisticModel> {
    let dim = validate_training_set(x, y)?;
    if !(cfg.l2 >= 0.0) {
        return Err(Error::invalid("l2 must be non-negative"));
    }
    let lr = cfg.lr.unwrap_or_else(|| 1.0 / smoothness_bound(x, cfg.l2));
    if !(lr > 0.0) {
        return Err(Error::invalid("learning rate must be positive"));
    }
    let mut model = LogisticModel::zeros(dim, cfg.l2, seed);
    let (mut loss, mut gw, mut gb) = loss_and_gradient(x, y, &model.weights, model.bias, cfg.l2);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let gnorm = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
        if gnorm < cfg.tol {
            converged = true;
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= lr * g;
        }
        model.bias -= lr * gb;
        (loss, gw, gb) = loss_and_gradient(x, y, &model.weights, model.bias, cfg.l2);
        iterations += 1;
    }
    if !converged {
        converged = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs())) < cfg.tol;
    }
    model.iterations = iterations;
    model.final_loss = loss;
    model.converged = converged;
    Ok(model)
}

/// Label 1 iff `prob ≥ threshold`.
pub fn assign_labels(probs: &[f64], threshold: f64) -> Vec<bool> {
    probs.iter().map(|&p| p >= threshold).collect()
}
