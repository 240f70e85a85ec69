use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logistic::{train_logistic, validate_training_set, LogisticModel, TrainConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub members: usize,
    pub balance: bool,
    pub train: TrainConfig,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            members: 10,
            balance: true,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub members: Vec<LogisticModel>,
}

impl EnsembleModel {
    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// Mean of member probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.members.iter().map(|m| m.predict_proba(x)).sum::<f64>() / self.members.len() as f64
    }
}

/// Random stream for ensemble member `member`.
pub fn member_rng(seed: u64, member: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member as u64);
    rng
}

/// Bootstrap indices. With `balance`, draws `⌈n/2⌉` with replacement from
/// each class; otherwise `n` draws from the whole set, redrawn until both
/// classes appear.
pub fn bootstrap_indices(y: &[bool], balance: bool, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = y.len();
    if balance {
        let pos: Vec<usize> = (0..n).filter(|&i| y[i]).collect();
        let neg: Vec<usize> = (0..n).filter(|&i| !y[i]).collect();
        let half = n.div_ceil(2);
        let mut idx = Vec::with_capacity(2 * half);
        for class in [&pos, &neg] {
            for _ in 0..half {
                idx.push(class[rng.random_range(0..class.len())]);
            }
        }
        idx
    } else {
        loop {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let p = idx.iter().filter(|&&i| y[i]).count();
            if p > 0 && p < n {
                return idx;
            }
        }
    }
}

/// Trains `members` logistic models on bootstrap resamples in parallel; member
/// `b` uses stream `b` of a generator seeded with `seed`.
pub fn train_ensemble(x: &[Vec<f64>], y: &[bool], cfg: &EnsembleConfig, seed: u64) -> Result<EnsembleModel> {
    validate_training_set(x, y)?;
    if cfg.members == 0 {
        return Err(Error::invalid("ensemble needs at least one member"));
    }
    let members = (0..cfg.members)
        .into_par_iter()
        .map(|b| {
            let mut rng = member_rng(seed, b);
            let idx = bootstrap_indices(y, cfg.balance, &mut rng);
            let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
            let ys: Vec<bool> = idx.iter().map(|&i| y[i]).collect();
            train_logistic(&xs, &ys, &cfg.train, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel { members })
}
