//! Per-dimension binary classifiers over fixed embeddings: a logistic head,
//! bagged class-balanced ensembles, thresholded labeling, pooled k-fold
//! evaluation and inter-coder agreement.

mod agreement;
mod ensemble;
mod eval;
mod logistic;
pub mod model_file;

use serde::{Deserialize, Serialize};

pub use agreement::{gwet_agreement, Agreement};
pub use ensemble::{bootstrap_indices, member_rng, train_ensemble, EnsembleConfig, EnsembleModel};
pub use eval::{
    cross_validate, stratified_folds, BinaryMetrics, ClassMetrics, Confusion, EvalReport,
};
pub use logistic::{
    assign_labels, loss_and_gradient, sigmoid, train_logistic, LogisticModel, TrainConfig,
};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Logistic(TrainConfig),
    Ensemble(EnsembleConfig),
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Ensemble(EnsembleConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Single(LogisticModel),
    Ensemble(EnsembleModel),
}

impl Classifier {
    pub fn train(spec: &ClassifierSpec, x: &[Vec<f64>], y: &[bool], seed: u64) -> Result<Self> {
        Ok(match spec {
            ClassifierSpec::Logistic(cfg) => Classifier::Single(train_logistic(x, y, cfg, seed)?),
            ClassifierSpec::Ensemble(cfg) => Classifier::Ensemble(train_ensemble(x, y, cfg, seed)?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Classifier::Single(m) => m.dim(),
            Classifier::Ensemble(e) => e.dim(),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        match self {
            Classifier::Single(m) => m.predict_proba(x),
            Classifier::Ensemble(e) => e.predict_proba(x),
        }
    }
}
