use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::model::{Dataset, Dimension, LabelSource};

/// Survey users on one side, influencers on the other; an edge means the
/// survey user follows the influencer.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteFollowerGraph {
    pub survey_users: Vec<String>,
    pub influencers: Vec<String>,
    /// Sorted survey-user indices following each influencer.
    pub followers: Vec<Vec<usize>>,
}

impl BipartiteFollowerGraph {
    pub fn edge_count(&self) -> usize {
        self.followers.iter().map(Vec::len).sum()
    }

    pub fn influencer_index(&self, id: &str) -> Option<usize> {
        self.influencers.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    /// Survey followers of an account; empty for anything outside `V`.
    pub fn followers_of(&self, id: &str) -> &[usize] {
        self.influencer_index(id).map_or(&[], |i| &self.followers[i])
    }
}

pub fn build_bipartite(dataset: &Dataset) -> BipartiteFollowerGraph {
    let survey_users: Vec<String> = dataset.survey_ids().into_iter().map(String::from).collect();
    let influencers: Vec<String> = dataset
        .influencers()
        .map(|a| a.id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let u_index: HashMap<&str, usize> = survey_users
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let v_index: HashMap<&str, usize> = influencers
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut followers = vec![Vec::new(); influencers.len()];
    for e in dataset.follows() {
        if let (Some(&u), Some(&v)) = (
            u_index.get(e.follower_id.as_str()),
            v_index.get(e.followee_id.as_str()),
        ) {
            followers[v].push(u);
        }
    }
    for f in &mut followers {
        f.sort_unstable();
        f.dedup();
    }
    BipartiteFollowerGraph {
        survey_users,
        influencers,
        followers,
    }
}

/// Influencer co-followership: weight is the number of shared survey
/// followers. Keys are `(i, j)` with `i < j`, indices into `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedFollowerProjection {
    pub nodes: Vec<String>,
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl SharedFollowerProjection {
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.get(&key).copied().unwrap_or(0)
    }
}

pub fn project_shared_followers(g: &BipartiteFollowerGraph) -> SharedFollowerProjection {
    let mut follows: Vec<Vec<usize>> = vec![Vec::new(); g.survey_users.len()];
    for (v, fs) in g.followers.iter().enumerate() {
        for &u in fs {
            follows[u].push(v);
        }
    }
    let mut edges = BTreeMap::new();
    for vs in &follows {
        for (k, &i) in vs.iter().enumerate() {
            for &j in &vs[k + 1..] {
                *edges.entry((i, j)).or_insert(0u64) += 1;
            }
        }
    }
    SharedFollowerProjection {
        nodes: g.influencers.clone(),
        edges,
    }
}

/// Which posts count as message events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionFilter {
    pub dimension: Dimension,
    pub source: LabelSource,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RetweetEdge {
    pub weight: u64,
    /// Ids of the retweet posts behind this edge.
    pub posts: Vec<String>,
}

/// Directed retweet layer. Edge `(i, j)` means `nodes[j]` retweeted
/// `nodes[i]`. Retweeters are always influencers; sources may lie outside
/// the influencer set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetweetGraph {
    pub dimension: Option<Dimension>,
    pub nodes: Vec<String>,
    pub is_influencer: Vec<bool>,
    pub edges: BTreeMap<(usize, usize), RetweetEdge>,
    /// Qualifying original (non-retweet) posts per influencer node.
    pub originals: BTreeMap<usize, u64>,
    /// Retweets whose source post is not in the dataset. Their edges are
    /// still built from the recorded author id.
    pub unresolved_sources: Vec<String>,
}

impl RetweetGraph {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|v| v.as_str().cmp(id)).ok()
    }

    /// Total number of retweet instances.
    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|e| e.weight).sum()
    }

    pub fn out_degrees(&self) -> Vec<u64> {
        let mut d = vec![0; self.nodes.len()];
        for (&(i, _), e) in &self.edges {
            d[i] += e.weight;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<u64> {
        let mut d = vec![0; self.nodes.len()];
        for (&(_, j), e) in &self.edges {
            d[j] += e.weight;
        }
        d
    }

    /// Unit edge instances in key order, each weighted edge repeated.
    pub fn instances(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.total_weight() as usize);
        for (&(i, j), e) in &self.edges {
            for _ in 0..e.weight {
                out.push((i as u32, j as u32));
            }
        }
        out
    }

    /// Same nodes and originals with the edges replaced by collapsed
    /// instances. Post provenance is not carried over.
    pub fn with_instances(&self, instances: &[(u32, u32)]) -> RetweetGraph {
        let mut edges: BTreeMap<(usize, usize), RetweetEdge> = BTreeMap::new();
        for &(i, j) in instances {
            edges.entry((i as usize, j as usize)).or_default().weight += 1;
        }
        RetweetGraph {
            dimension: self.dimension,
            nodes: self.nodes.clone(),
            is_influencer: self.is_influencer.clone(),
            edges,
            originals: self.originals.clone(),
            unresolved_sources: Vec::new(),
        }
    }
}

/// Retweet graph over posts authored by influencers. With a filter, only
/// posts labeled uncivil in that dimension qualify.
pub fn build_retweet_graph(dataset: &Dataset, filter: Option<DimensionFilter>) -> RetweetGraph {
    let mut node_set: BTreeSet<&str> = dataset.influencers().map(|a| a.id.as_str()).collect();
    let qualifying: Vec<usize> = dataset
        .posts()
        .iter()
        .enumerate()
        .filter(|(_, p)| dataset.account(&p.author_id).is_some_and(|a| a.is_influencer))
        .filter(|&(i, _)| filter.is_none_or(|f| dataset.is_uncivil(i, f.dimension, f.source)))
        .map(|(i, _)| i)
        .collect();
    for &i in &qualifying {
        if let Some(rt) = &dataset.posts()[i].retweet_of {
            node_set.insert(rt.author_id.as_str());
        }
    }
    let nodes: Vec<String> = node_set.into_iter().map(String::from).collect();
    let is_influencer = nodes
        .iter()
        .map(|n| dataset.account(n).is_some_and(|a| a.is_influencer))
        .collect();
    let index = |id: &str| nodes.binary_search_by(|v| v.as_str().cmp(id)).unwrap();
    let mut edges: BTreeMap<(usize, usize), RetweetEdge> = BTreeMap::new();
    let mut originals = BTreeMap::new();
    let mut unresolved_sources = Vec::new();
    for &i in &qualifying {
        let p = &dataset.posts()[i];
        let v = index(&p.author_id);
        match &p.retweet_of {
            None => *originals.entry(v).or_insert(0) += 1,
            Some(rt) => {
                if dataset.post(&rt.post_id).is_none() {
                    unresolved_sources.push(p.id.clone());
                }
                let e = edges.entry((index(&rt.author_id), v)).or_default();
                e.weight += 1;
                e.posts.push(p.id.clone());
            }
        }
    }
    RetweetGraph {
        dimension: filter.map(|f| f.dimension),
        nodes,
        is_influencer,
        edges,
        originals,
        unresolved_sources,
    }
}
