use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graphs::{BipartiteFollowerGraph, RetweetGraph};
use super::motifs::{Motif, MotifCounter, MotifCounts};
use crate::error::{Error, Result};
use crate::model::Dimension;

pub const DEFAULT_SWAP_FACTOR: u32 = 10;
pub const DEFAULT_REPLICATES: usize = 100;

/// Which retweet instances the swap chain may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullScope {
    /// Every instance, self-loops included.
    #[default]
    AllEdges,
    /// Only instances that are self-loops in the observed graph; all other
    /// edges stay frozen.
    SelfLoopsOnly,
}

/// Degree-preserving double-edge swaps on unit edge instances: two
/// instances `(a, b)` and `(c, d)` become `(a, d)` and `(c, b)`. Self-loops
/// and parallel edges are allowed, so every proposal is accepted.
pub fn swap_instances(instances: &mut [(u32, u32)], movable: &[usize], attempts: u64, rng: &mut impl Rng) {
    let m = movable.len();
    if m < 2 {
        return;
    }
    for _ in 0..attempts {
        let i = movable[rng.random_range(0..m)];
        let j = movable[rng.random_range(0..m)];
        if i == j {
            continue;
        }
        let tmp = instances[i].1;
        instances[i].1 = instances[j].1;
        instances[j].1 = tmp;
    }
}

fn movable_indices(instances: &[(u32, u32)], scope: NullScope) -> Vec<usize> {
    match scope {
        NullScope::AllEdges => (0..instances.len()).collect(),
        NullScope::SelfLoopsOnly => instances
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| a == b)
            .map(|(i, _)| i)
            .collect(),
    }
}

/// `swap_factor · |R|` swap attempts, where `|R|` counts unit instances.
pub fn randomize_retweets(r: &RetweetGraph, seed: u64, swap_factor: u32, scope: NullScope) -> Result<RetweetGraph> {
    if swap_factor < 1 {
        return Err(Error::Config {
            field: "swap_factor".into(),
            reason: "must be at least 1".into(),
        });
    }
    let mut inst = r.instances();
    let movable = movable_indices(&inst, scope);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = swap_factor as u64 * inst.len() as u64;
    swap_instances(&mut inst, &movable, attempts, &mut rng);
    Ok(r.with_instances(&inst))
}

fn replicate_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 + 1);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullConfig {
    pub replicates: usize,
    pub swap_factor: u32,
    pub scope: NullScope,
    pub seed: u64,
}

impl Default for NullConfig {
    fn default() -> Self {
        NullConfig {
            replicates: DEFAULT_REPLICATES,
            swap_factor: DEFAULT_SWAP_FACTOR,
            scope: NullScope::AllEdges,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifZ {
    pub observed: u64,
    pub mean: f64,
    pub std: f64,
    /// Absent when the replicates have zero spread.
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelResult {
    pub dimension: Option<Dimension>,
    pub config: NullConfig,
    pub direct: MotifZ,
    pub two_step: MotifZ,
    pub mixed: MotifZ,
}

impl NullModelResult {
    pub fn get(&self, m: Motif) -> &MotifZ {
        match m {
            Motif::Direct => &self.direct,
            Motif::TwoStep => &self.two_step,
            Motif::Mixed => &self.mixed,
        }
    }
}

fn degrees(inst: &[(u32, u32)], n: usize) -> (Vec<u64>, Vec<u64>) {
    let mut out = vec![0; n];
    let mut inn = vec![0; n];
    for &(a, b) in inst {
        out[a as usize] += 1;
        inn[b as usize] += 1;
    }
    (out, inn)
}

/// Replicate motif counts under the swap null. Each replicate draws from
/// its own stream of the root seed, so results do not depend on scheduling.
/// Degree sequences are checked on every replicate.
pub fn null_replicates(g: &BipartiteFollowerGraph, r: &RetweetGraph, cfg: &NullConfig) -> Vec<MotifCounts> {
    let counter = MotifCounter::new(g, r);
    let base = r.instances();
    let movable = movable_indices(&base, cfg.scope);
    let attempts = cfg.swap_factor as u64 * base.len() as u64;
    let (out0, in0) = degrees(&base, r.nodes.len());
    (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| {
            let mut inst = base.clone();
            let mut rng = replicate_rng(cfg.seed, rep);
            swap_instances(&mut inst, &movable, attempts, &mut rng);
            let (out1, in1) = degrees(&inst, r.nodes.len());
            assert!(out0 == out1 && in0 == in1, "swap chain broke a degree sequence");
            counter.count_instances(&r.originals, &inst)
        })
        .collect()
}

fn summarize(observed: u64, values: impl Iterator<Item = u64> + Clone, n: usize) -> MotifZ {
    let mean = values.clone().map(|v| v as f64).sum::<f64>() / n as f64;
    let var = values.map(|v| (v as f64 - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let std = var.sqrt();
    if std > 0.0 {
        MotifZ {
            observed,
            mean,
            std,
            z: Some((observed as f64 - mean) / std),
            note: None,
        }
    } else {
        MotifZ {
            observed,
            mean,
            std,
            z: None,
            note: Some("randomized counts have zero variance".into()),
        }
    }
}

pub fn motif_zscores(g: &BipartiteFollowerGraph, r: &RetweetGraph, cfg: &NullConfig) -> Result<NullModelResult> {
    if cfg.replicates < 30 {
        return Err(Error::Config {
            field: "null.replicates".into(),
            reason: format!("must be at least 30, got {}", cfg.replicates),
        });
    }
    if cfg.swap_factor < 1 {
        return Err(Error::Config {
            field: "null.swap_factor".into(),
            reason: "must be at least 1".into(),
        });
    }
    let observed = MotifCounter::new(g, r).count_graph(r);
    let reps = null_replicates(g, r, cfg);
    let n = reps.len();
    let z = |m: Motif| summarize(observed.get(m), reps.iter().map(move |c| c.get(m)), n);
    Ok(NullModelResult {
        dimension: r.dimension,
        config: *cfg,
        direct: z(Motif::Direct),
        two_step: z(Motif::TwoStep),
        mixed: z(Motif::Mixed),
    })
}
