use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::graphs::{BipartiteFollowerGraph, RetweetGraph};
use crate::model::Dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motif {
    Direct,
    TwoStep,
    Mixed,
}

impl Motif {
    pub const ALL: [Motif; 3] = [Motif::Direct, Motif::TwoStep, Motif::Mixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Motif::Direct => "direct",
            Motif::TwoStep => "two_step",
            Motif::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifCounts {
    pub direct: u64,
    pub two_step: u64,
    pub mixed: u64,
}

impl MotifCounts {
    pub fn get(&self, m: Motif) -> u64 {
        match m {
            Motif::Direct => self.direct,
            Motif::TwoStep => self.two_step,
            Motif::Mixed => self.mixed,
        }
    }

    pub fn total(&self) -> u64 {
        self.direct + self.two_step + self.mixed
    }
}

/// Motif counts plus the account pairs that produced them, each weighted by
/// the number of (survey user, message) exposures it contributed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MotifCensus {
    pub dimension: Option<Dimension>,
    pub counts: MotifCounts,
    /// Poster id → direct exposures.
    pub direct: BTreeMap<String, u64>,
    /// (source, retweeter) → exposures.
    pub two_step: BTreeMap<(String, String), u64>,
    pub mixed: BTreeMap<(String, String), u64>,
}

/// Follower counts and pairwise co-followership over retweet-graph nodes.
/// Accounts outside the influencer set have no followers.
#[derive(Debug, Clone)]
pub struct MotifCounter {
    followers: Vec<u64>,
    common: HashMap<(u32, u32), u64>,
}

impl MotifCounter {
    pub fn new(g: &BipartiteFollowerGraph, r: &RetweetGraph) -> Self {
        let node_of: Vec<Option<u32>> = g
            .influencers
            .iter()
            .map(|v| r.node_index(v).map(|i| i as u32))
            .collect();
        let followers = r
            .nodes
            .iter()
            .map(|n| g.followers_of(n).len() as u64)
            .collect();
        let mut follows: Vec<Vec<u32>> = vec![Vec::new(); g.survey_users.len()];
        for (v, fs) in g.followers.iter().enumerate() {
            if let Some(n) = node_of[v] {
                for &u in fs {
                    follows[u].push(n);
                }
            }
        }
        let mut common = HashMap::new();
        for ns in &follows {
            for (k, &a) in ns.iter().enumerate() {
                for &b in &ns[k + 1..] {
                    let key = if a < b { (a, b) } else { (b, a) };
                    *common.entry(key).or_insert(0) += 1;
                }
            }
        }
        MotifCounter { followers, common }
    }

    pub fn followers(&self, node: usize) -> u64 {
        self.followers[node]
    }

    pub fn common(&self, a: usize, b: usize) -> u64 {
        if a == b {
            return self.followers[a];
        }
        let key = if a < b { (a as u32, b as u32) } else { (b as u32, a as u32) };
        self.common.get(&key).copied().unwrap_or(0)
    }

    /// Counts for a set of unit retweet instances `(source, retweeter)` plus
    /// fixed original posts.
    pub fn count_instances(&self, originals: &BTreeMap<usize, u64>, instances: &[(u32, u32)]) -> MotifCounts {
        let mut c = MotifCounts::default();
        for (&v, &n) in originals {
            c.direct += n * self.followers[v];
        }
        for &(a, v) in instances {
            let (a, v) = (a as usize, v as usize);
            let fv = self.followers[v];
            if a == v {
                c.direct += fv;
            } else {
                let shared = self.common(a, v);
                c.mixed += shared;
                c.two_step += fv - shared;
            }
        }
        c
    }

    pub fn count_graph(&self, r: &RetweetGraph) -> MotifCounts {
        let mut c = MotifCounts::default();
        for (&v, &n) in &r.originals {
            c.direct += n * self.followers[v];
        }
        for (&(a, v), e) in &r.edges {
            let fv = self.followers[v];
            if a == v {
                c.direct += e.weight * fv;
            } else {
                let shared = self.common(a, v);
                c.mixed += e.weight * shared;
                c.two_step += e.weight * (fv - shared);
            }
        }
        c
    }
}

/// Every (survey user, qualifying message event) pair is classified into
/// exactly one motif: originals and self-retweets by a followed influencer
/// are direct; a retweet of `a` by followed `v` is mixed when the user also
/// follows `a`, two-step otherwise.
pub fn count_motifs(g: &BipartiteFollowerGraph, r: &RetweetGraph) -> MotifCensus {
    let counter = MotifCounter::new(g, r);
    let mut census = MotifCensus {
        dimension: r.dimension,
        counts: counter.count_graph(r),
        ..MotifCensus::default()
    };
    for (&v, &n) in &r.originals {
        let x = n * counter.followers(v);
        if x > 0 {
            *census.direct.entry(r.nodes[v].clone()).or_insert(0) += x;
        }
    }
    for (&(a, v), e) in &r.edges {
        let fv = counter.followers(v);
        if a == v {
            if fv > 0 {
                *census.direct.entry(r.nodes[v].clone()).or_insert(0) += e.weight * fv;
            }
            continue;
        }
        let shared = counter.common(a, v);
        let key = (r.nodes[a].clone(), r.nodes[v].clone());
        if shared > 0 {
            census.mixed.insert(key.clone(), e.weight * shared);
        }
        if fv > shared {
            census.two_step.insert(key, e.weight * (fv - shared));
        }
    }
    census
}
