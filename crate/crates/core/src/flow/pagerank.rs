use serde::{Deserialize, Serialize};

use super::graphs::RetweetGraph;
use crate::error::{Error, Result};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: DEFAULT_DAMPING,
            tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedAccount {
    pub rank: usize,
    pub account_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRankResult {
    /// Scores indexed like the graph's nodes.
    pub scores: Vec<f64>,
    /// Descending score, ties by ascending id.
    pub ranking: Vec<RankedAccount>,
    pub iterations: usize,
    pub residual: f64,
}

/// Weighted PageRank over a general directed graph given as
/// `(from, to, weight)` links on `n` nodes.
pub fn pagerank(n: usize, links: &[(usize, usize, f64)], cfg: &PageRankConfig) -> Result<(Vec<f64>, usize, f64)> {
    if n == 0 {
        return Err(Error::invalid("PageRank needs at least one node"));
    }
    if !(cfg.damping > 0.0 && cfg.damping < 1.0) {
        return Err(Error::Config {
            field: "pagerank.damping".into(),
            reason: format!("must lie in (0, 1), got {}", cfg.damping),
        });
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::Config {
            field: "pagerank.tol".into(),
            reason: "must be positive".into(),
        });
    }
    let mut out_weight = vec![0.0; n];
    for &(from, _, w) in links {
        out_weight[from] += w;
    }
    let d = cfg.damping;
    let nf = n as f64;
    let mut r = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let dangling: f64 = (0..n).filter(|&i| out_weight[i] == 0.0).map(|i| r[i]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for &(from, to, w) in links {
            next[to] += d * r[from] * w / out_weight[from];
        }
        residual = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut r, &mut next);
        if residual < cfg.tol {
            return Ok((r, it, residual));
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iter,
        residual,
    })
}

/// Credit flows from retweeter to original author, in proportion to
/// retweet counts.
pub fn pagerank_creators(r: &RetweetGraph, cfg: &PageRankConfig) -> Result<PageRankResult> {
    let links: Vec<(usize, usize, f64)> = r
        .edges
        .iter()
        .map(|(&(src, rt), e)| (rt, src, e.weight as f64))
        .collect();
    let (scores, iterations, residual) = pagerank(r.nodes.len(), &links, cfg)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then_with(|| r.nodes[a].cmp(&r.nodes[b])));
    let ranking = order
        .iter()
        .enumerate()
        .map(|(k, &i)| RankedAccount {
            rank: k + 1,
            account_id: r.nodes[i].clone(),
            score: scores[i],
        })
        .collect();
    Ok(PageRankResult {
        scores,
        ranking,
        iterations,
        residual,
    })
}
