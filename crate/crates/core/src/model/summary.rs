use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::dataset::Dataset;
use super::types::{Dimension, LabelSource, PerDimension};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DimensionSummary {
    /// Posts labeled uncivil.
    pub posts: usize,
    /// Distinct authors of those posts.
    pub influencers: usize,
    /// Survey users following at least one of those authors.
    pub followers: usize,
    /// Distinct posts carrying at least one human annotation.
    pub annotated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummaryStats {
    pub accounts: usize,
    pub influencers: usize,
    pub posts: usize,
    pub follows: usize,
    pub survey_users: usize,
    pub per_dimension: PerDimension<DimensionSummary>,
}

impl SummaryStats {
    pub fn dimension(&self, d: Dimension) -> DimensionSummary {
        self.per_dimension[d]
    }
}

pub fn dataset_summary(dataset: &Dataset, source: LabelSource) -> SummaryStats {
    let survey: HashSet<&str> = dataset.survey_ids().into_iter().collect();
    let per_dimension = PerDimension::from_fn(|d| {
        let mut posts = 0;
        let mut authors = BTreeSet::new();
        for (i, p) in dataset.posts().iter().enumerate() {
            if dataset.is_uncivil(i, d, source) {
                posts += 1;
                authors.insert(p.author_id.as_str());
            }
        }
        let followers: BTreeSet<&str> = dataset
            .follows()
            .iter()
            .filter(|e| {
                survey.contains(e.follower_id.as_str()) && authors.contains(e.followee_id.as_str())
            })
            .map(|e| e.follower_id.as_str())
            .collect();
        let annotated: BTreeSet<&str> = dataset
            .annotations()
            .iter()
            .filter(|a| a.dimension == d)
            .map(|a| a.post_id.as_str())
            .collect();
        DimensionSummary {
            posts,
            influencers: authors.len(),
            followers: followers.len(),
            annotated: annotated.len(),
        }
    });
    SummaryStats {
        accounts: dataset.accounts().len(),
        influencers: dataset.influencers().count(),
        posts: dataset.posts().len(),
        follows: dataset.follows().len(),
        survey_users: dataset.survey_users().len(),
        per_dimension,
    }
}
