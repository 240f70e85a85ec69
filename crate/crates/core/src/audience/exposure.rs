use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Dimension, LabelSource};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRecord {
    pub influencer_id: String,
    pub dimension: Dimension,
    pub uncivil_count: usize,
    pub total_count: usize,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureRecord {
    pub influencer_id: String,
    pub dimension: Dimension,
    pub exposure: u64,
    pub direct: u64,
    pub indirect: u64,
    /// Distinct survey users reached directly or through a relay.
    #[serde(skip)]
    pub exposed_users: BTreeSet<String>,
}

/// How repeated receptions by the same survey user are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExposureMode {
    /// Every (uncivil post, receiving survey follower) pair counts.
    #[default]
    PerPost,
    /// Size of the union of reached survey users.
    DistinctUsers,
}

/// Lookup tables shared by density and exposure computations.
pub struct AudienceIndex<'a> {
    dataset: &'a Dataset,
    survey_followers: HashMap<&'a str, Vec<&'a str>>,
    posts_by_author: HashMap<&'a str, Vec<usize>>,
    /// post id → positions of retweets of it by influencers other than its author
    relays: HashMap<&'a str, Vec<usize>>,
}

impl<'a> AudienceIndex<'a> {
    pub fn new(dataset: &'a Dataset) -> Self {
        let survey = dataset.survey_ids();
        let mut survey_followers: HashMap<&str, Vec<&str>> = HashMap::new();
        for e in dataset.follows() {
            if survey.contains(e.follower_id.as_str()) {
                survey_followers
                    .entry(e.followee_id.as_str())
                    .or_default()
                    .push(e.follower_id.as_str());
            }
        }
        for v in survey_followers.values_mut() {
            v.sort_unstable();
        }
        let mut posts_by_author: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut relays: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, p) in dataset.posts().iter().enumerate() {
            posts_by_author.entry(p.author_id.as_str()).or_default().push(i);
            if let Some(rt) = &p.retweet_of {
                let relayer_is_influencer = dataset.account(&p.author_id).is_some_and(|a| a.is_influencer);
                if relayer_is_influencer && rt.author_id != p.author_id {
                    relays.entry(rt.post_id.as_str()).or_default().push(i);
                }
            }
        }
        AudienceIndex {
            dataset,
            survey_followers,
            posts_by_author,
            relays,
        }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn survey_followers(&self, account: &str) -> &[&'a str] {
        self.survey_followers.get(account).map_or(&[], Vec::as_slice)
    }

    pub fn incivility_density(&self, influencer: &str, d: Dimension, source: LabelSource) -> Result<DensityRecord> {
        let posts = self.posts_by_author.get(influencer).map_or(&[][..], Vec::as_slice);
        if posts.is_empty() {
            return Err(Error::invalid(format!("influencer `{influencer}` has no posts in window")));
        }
        let uncivil = posts
            .iter()
            .filter(|&&i| self.dataset.is_uncivil(i, d, source))
            .count();
        Ok(DensityRecord {
            influencer_id: influencer.to_string(),
            dimension: d,
            uncivil_count: uncivil,
            total_count: posts.len(),
            density: uncivil as f64 / posts.len() as f64,
        })
    }

    /// Receptions of `influencer`'s uncivil posts by survey users: its own
    /// survey followers per post, plus the survey followers of each other
    /// influencer who retweeted that post.
    pub fn exposure_count(&self, influencer: &str, d: Dimension, source: LabelSource, mode: ExposureMode) -> ExposureRecord {
        let own = self.survey_followers(influencer);
        let mut direct = 0u64;
        let mut indirect = 0u64;
        let mut users: BTreeSet<String> = BTreeSet::new();
        let posts = self.posts_by_author.get(influencer).map_or(&[][..], Vec::as_slice);
        for &i in posts {
            if !self.dataset.is_uncivil(i, d, source) {
                continue;
            }
            direct += own.len() as u64;
            users.extend(own.iter().map(|s| s.to_string()));
            let pid = self.dataset.posts()[i].id.as_str();
            for &r in self.relays.get(pid).map_or(&[][..], Vec::as_slice) {
                let relayer = self.dataset.posts()[r].author_id.as_str();
                let f = self.survey_followers(relayer);
                indirect += f.len() as u64;
                users.extend(f.iter().map(|s| s.to_string()));
            }
        }
        let exposure = match mode {
            ExposureMode::PerPost => direct + indirect,
            ExposureMode::DistinctUsers => users.len() as u64,
        };
        ExposureRecord {
            influencer_id: influencer.to_string(),
            dimension: d,
            exposure,
            direct,
            indirect,
            exposed_users: users,
        }
    }

    /// Density for every influencer with at least one post; ids without posts
    /// are returned separately.
    pub fn densities(&self, d: Dimension, source: LabelSource) -> (Vec<DensityRecord>, Vec<String>) {
        let mut records = Vec::new();
        let mut excluded = Vec::new();
        for a in self.dataset.influencers() {
            match self.incivility_density(&a.id, d, source) {
                Ok(r) => records.push(r),
                Err(_) => excluded.push(a.id.clone()),
            }
        }
        (records, excluded)
    }
}
