use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::types::{
    Account, Annotation, Dimension, FollowEdge, Identity, LabelSource, PerDimension, Post,
    StudyWindow, SurveyUser,
};
use crate::error::{Error, Result};

/// Records rejected during validation because they fall outside the study window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DropCounts {
    pub posts_outside_window: usize,
}

/// Validated, immutable corpus. Label attachment and influencer marking
/// produce new revisions rather than mutating an existing value.
#[derive(Debug, Clone)]
pub struct Dataset {
    accounts: Vec<Account>,
    posts: Vec<Post>,
    follows: Vec<FollowEdge>,
    survey_users: Vec<SurveyUser>,
    window: StudyWindow,
    annotations: Vec<Annotation>,
    human: Vec<PerDimension<Option<bool>>>,
    account_index: HashMap<String, usize>,
    post_index: HashMap<String, usize>,
    revision: u32,
}

impl Dataset {
    /// Validates raw records and assembles a dataset. Posts outside the
    /// window are dropped and counted; every other violation is an error.
    pub fn from_records(
        mut accounts: Vec<Account>,
        posts: Vec<Post>,
        follows: Vec<FollowEdge>,
        survey_users: Vec<SurveyUser>,
        window: StudyWindow,
    ) -> Result<(Self, DropCounts)> {
        let mut account_index = HashMap::with_capacity(accounts.len());
        for (i, a) in accounts.iter_mut().enumerate() {
            if a.id.is_empty() {
                return Err(Error::invalid("account with empty id"));
            }
            if account_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(a.id.clone()));
            }
            if a.identities.is_empty() {
                a.identities.insert(Identity::Unlabeled);
            }
            if a.identities.contains(&Identity::Left) && a.identities.contains(&Identity::Right) {
                return Err(Error::invalid(format!(
                    "account `{}` is annotated both left and right",
                    a.id
                )));
            }
        }

        let mut drops = DropCounts::default();
        let mut kept = Vec::with_capacity(posts.len());
        let mut seen_posts = HashSet::with_capacity(posts.len());
        for p in posts {
            if !seen_posts.insert(p.id.clone()) {
                return Err(Error::DuplicateId(p.id));
            }
            if !account_index.contains_key(&p.author_id) {
                return Err(Error::DanglingReference {
                    kind: "author_id",
                    id: p.author_id,
                });
            }
            if let Some(rt) = &p.retweet_of {
                if rt.author_id.is_empty() {
                    return Err(Error::invalid(format!(
                        "post `{}` has a retweet with empty original author",
                        p.id
                    )));
                }
            }
            if !window.contains(p.timestamp) {
                drops.posts_outside_window += 1;
                continue;
            }
            kept.push(p);
        }
        kept.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
        let post_index = kept
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();

        let mut seen_edges = HashSet::with_capacity(follows.len());
        for e in &follows {
            for id in [&e.follower_id, &e.followee_id] {
                if !account_index.contains_key(id) {
                    return Err(Error::DanglingReference {
                        kind: "follow endpoint",
                        id: id.clone(),
                    });
                }
            }
            if e.follower_id == e.followee_id {
                return Err(Error::invalid(format!("self-follow by `{}`", e.follower_id)));
            }
            if !seen_edges.insert((e.follower_id.as_str(), e.followee_id.as_str())) {
                return Err(Error::DuplicateId(format!(
                    "{}->{}",
                    e.follower_id, e.followee_id
                )));
            }
        }

        let mut seen_survey = HashSet::new();
        for s in &survey_users {
            if !account_index.contains_key(&s.id) {
                return Err(Error::DanglingReference {
                    kind: "survey user",
                    id: s.id.clone(),
                });
            }
            if !seen_survey.insert(s.id.as_str()) {
                return Err(Error::DuplicateId(s.id.clone()));
            }
        }

        let human = vec![PerDimension::default(); kept.len()];
        Ok((
            Dataset {
                accounts,
                posts: kept,
                follows,
                survey_users,
                window,
                annotations: Vec::new(),
                human,
                account_index,
                post_index,
                revision: 0,
            },
            drops,
        ))
    }

    pub fn accounts(&self) -> &[Account] {
        &self.accounts
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn follows(&self) -> &[FollowEdge] {
        &self.follows
    }

    pub fn survey_users(&self) -> &[SurveyUser] {
        &self.survey_users
    }

    pub fn window(&self) -> StudyWindow {
        self.window
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    /// Incremented by every derived revision.
    pub fn revision(&self) -> u32 {
        self.revision
    }

    pub fn account(&self, id: &str) -> Option<&Account> {
        self.account_index.get(id).map(|&i| &self.accounts[i])
    }

    pub fn account_position(&self, id: &str) -> Option<usize> {
        self.account_index.get(id).copied()
    }

    pub fn post(&self, id: &str) -> Option<&Post> {
        self.post_index.get(id).map(|&i| &self.posts[i])
    }

    pub fn post_position(&self, id: &str) -> Option<usize> {
        self.post_index.get(id).copied()
    }

    pub fn influencers(&self) -> impl Iterator<Item = &Account> {
        self.accounts.iter().filter(|a| a.is_influencer)
    }

    pub fn survey_ids(&self) -> BTreeSet<&str> {
        self.survey_users.iter().map(|s| s.id.as_str()).collect()
    }

    /// Unanimous human label for a post, if every coder who saw it agrees.
    pub fn human_label(&self, post_pos: usize, d: Dimension) -> Option<bool> {
        self.human.get(post_pos).and_then(|h| h[d])
    }

    pub fn is_uncivil(&self, post_pos: usize, d: Dimension, source: LabelSource) -> bool {
        match source {
            LabelSource::Machine => self.posts[post_pos].machine[d].is_some_and(|l| l.value),
            LabelSource::Human => self.human_label(post_pos, d).unwrap_or(false),
        }
    }

    pub(crate) fn derive(
        &self,
        accounts: Option<Vec<Account>>,
        posts: Option<Vec<Post>>,
        annotations: Option<Vec<Annotation>>,
    ) -> Dataset {
        let mut next = self.clone();
        if let Some(a) = accounts {
            next.accounts = a;
        }
        if let Some(p) = posts {
            next.posts = p;
        }
        if let Some(ann) = annotations {
            next.human = consensus(&next.posts, &next.post_index, &ann);
            next.annotations = ann;
        }
        next.revision += 1;
        next
    }

    /// Revision with `is_influencer` set exactly on the given ids.
    pub fn with_influencers<'a, I>(&self, ids: I) -> Dataset
    where
        I: IntoIterator<Item = &'a String>,
    {
        let ids: HashSet<&String> = ids.into_iter().collect();
        let accounts = self
            .accounts
            .iter()
            .map(|a| Account {
                is_influencer: ids.contains(&a.id),
                ..a.clone()
            })
            .collect();
        self.derive(Some(accounts), None, None)
    }
}

fn consensus(
    posts: &[Post],
    index: &HashMap<String, usize>,
    annotations: &[Annotation],
) -> Vec<PerDimension<Option<bool>>> {
    // None = no annotation yet, Some(None) = coders disagree
    let mut state: Vec<PerDimension<Option<Option<bool>>>> = vec![PerDimension::default(); posts.len()];
    for a in annotations {
        if let Some(&i) = index.get(&a.post_id) {
            let slot = &mut state[i][a.dimension];
            *slot = match *slot {
                None => Some(Some(a.value)),
                Some(Some(v)) if v == a.value => Some(Some(v)),
                _ => Some(None),
            };
        }
    }
    state
        .into_iter()
        .map(|s| PerDimension(s.0.map(|x| x.flatten())))
        .collect()
}
