use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Classifier, ClassifierSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(truth: &[bool], pred: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&t, &p) in truth.iter().zip(pred) {
            match (t, p) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl ClassMetrics {
    fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            support: tp + fn_,
        }
    }
}

/// Per-class and support-weighted metrics of a binary confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryMetrics {
    pub negative: ClassMetrics,
    pub positive: ClassMetrics,
    pub weighted_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub accuracy: f64,
}

impl BinaryMetrics {
    pub fn from_confusion(c: &Confusion) -> Self {
        let positive = ClassMetrics::new(c.tp, c.fp, c.fn_);
        let negative = ClassMetrics::new(c.tn, c.fn_, c.fp);
        let n = c.total() as f64;
        let w = |f: fn(&ClassMetrics) -> f64| {
            if n == 0.0 {
                0.0
            } else {
                (f(&positive) * positive.support as f64 + f(&negative) * negative.support as f64) / n
            }
        };
        BinaryMetrics {
            weighted_f1: w(|m| m.f1),
            weighted_precision: w(|m| m.precision),
            weighted_recall: w(|m| m.recall),
            accuracy: ratio(c.tp + c.tn, c.total()),
            negative,
            positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub folds: usize,
    pub n: usize,
    pub threshold: f64,
    pub seed: u64,
    pub classifier: ClassifierSpec,
    pub fold_of: Vec<usize>,
    pub confusion: Confusion,
    pub metrics: BinaryMetrics,
    /// Out-of-fold positive-class probabilities in input order.
    pub probabilities: Vec<f64>,
}

/// Stratified fold assignment: each class is shuffled with `seed` and dealt
/// round-robin, so fold class counts differ by at most one.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; y.len()];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    fold_of
}

/// Stratified k-fold evaluation with out-of-fold predictions pooled into a
/// single confusion matrix.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[bool],
    k: usize,
    spec: &ClassifierSpec,
    seed: u64,
    threshold: f64,
) -> Result<EvalReport> {
    if k < 2 {
        return Err(Error::invalid("cross-validation needs k ≥ 2"));
    }
    if x.len() != y.len() || x.len() < k {
        return Err(Error::invalid(format!(
            "cross-validation needs at least k={k} samples, got {}",
            x.len()
        )));
    }
    let fold_of = stratified_folds(y, k, seed);
    let mut probabilities = vec![0.0; y.len()];
    for fold in 0..k {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..y.len() {
            if fold_of[i] != fold {
                xs.push(x[i].clone());
                ys.push(y[i]);
            }
        }
        let model = Classifier::train(spec, &xs, &ys, seed.wrapping_add(fold as u64))
            .map_err(|e| Error::invalid(format!("fold {fold}: {e}")))?;
        for i in 0..y.len() {
            if fold_of[i] == fold {
                probabilities[i] = model.predict_proba(&x[i]);
            }
        }
    }
    let pred = super::assign_labels(&probabilities, threshold);
    let confusion = Confusion::from_predictions(y, &pred);
    Ok(EvalReport {
        folds: k,
        n: y.len(),
        threshold,
        seed,
        classifier: *spec,
        fold_of,
        confusion,
        metrics: BinaryMetrics::from_confusion(&confusion),
        probabilities,
    })
}
