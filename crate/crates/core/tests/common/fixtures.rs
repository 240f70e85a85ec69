//! Small seeded corpora for graph and pipeline tests.

use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use civiscope::model::{
    Account, AccountType, Dataset, Dimension, FollowEdge, MachineLabel, PerDimension, Post,
    RetweetOf, StudyWindow, SurveyUser,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn window() -> StudyWindow {
    StudyWindow::new(
        Utc.with_ymd_and_hms(2022, 8, 1, 0, 0, 0).unwrap(),
        Utc.with_ymd_and_hms(2022, 11, 1, 0, 0, 0).unwrap(),
    )
    .unwrap()
}

pub fn account(id: &str, kind: AccountType, influencer: bool) -> Account {
    Account {
        id: id.into(),
        handle: format!("{id}_handle"),
        account_type: kind,
        follower_count: if influencer { 5_000 } else { 10 },
        profile_text: String::new(),
        location: None,
        identities: BTreeSet::new(),
        is_influencer: influencer,
    }
}

pub fn survey(id: &str) -> SurveyUser {
    SurveyUser {
        id: id.into(),
        demographics: Default::default(),
        ideology: None,
    }
}

pub fn follow(u: &str, v: &str) -> FollowEdge {
    FollowEdge {
        follower_id: u.into(),
        followee_id: v.into(),
    }
}

/// Post at `minute` minutes past the window start, optionally labeled
/// uncivil in IMP.
pub fn post(id: &str, author: &str, minute: i64, retweet_of: Option<(&str, &str)>, imp: Option<bool>) -> Post {
    let mut machine = PerDimension::default();
    machine[Dimension::Imp] = imp.map(|value| MachineLabel {
        value,
        prob: Some(if value { 0.9 } else { 0.2 }),
    });
    Post {
        id: id.into(),
        author_id: author.into(),
        timestamp: window().start + chrono::Duration::minutes(minute),
        text: format!("text of {id}"),
        retweet_of: retweet_of.map(|(p, a)| RetweetOf {
            post_id: p.into(),
            author_id: a.into(),
        }),
        machine,
    }
}

pub fn dataset(accounts: Vec<Account>, posts: Vec<Post>, follows: Vec<FollowEdge>, survey: Vec<SurveyUser>) -> Dataset {
    Dataset::from_records(accounts, posts, follows, survey, window())
        .expect("fixture must validate")
        .0
}

const KINDS: [AccountType; 4] = [
    AccountType::Politician,
    AccountType::Media,
    AccountType::Individual,
    AccountType::Unknown,
];

/// Random flow instance: up to `max_v` influencers, `max_u` survey users and
/// `max_events` posts, plus outside accounts that get retweeted (some absent
/// from the account table) and non-influencer posts that must be ignored.
pub fn random_flow_dataset(seed: u64, max_v: usize, max_u: usize, max_events: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.random_range(2..=max_v);
    let nu = rng.random_range(1..=max_u);
    let nx = rng.random_range(0..=4);
    let n_events = rng.random_range(1..=max_events);
    let p_follow = rng.random_range(0.1..0.6);

    let vs: Vec<String> = (0..nv).map(|i| format!("v{i:02}")).collect();
    let us: Vec<String> = (0..nu).map(|i| format!("u{i:02}")).collect();
    let xs: Vec<String> = (0..nx).map(|i| format!("x{i:02}")).collect();
    let mut accounts: Vec<Account> = vs
        .iter()
        .map(|v| account(v, KINDS[rng.random_range(0..4)], true))
        .collect();
    accounts.extend(us.iter().map(|u| account(u, AccountType::Individual, false)));
    // odd-numbered outside accounts are missing from the account table
    accounts.extend(xs.iter().step_by(2).map(|x| account(x, AccountType::Individual, false)));

    let mut follows = Vec::new();
    for u in &us {
        for v in &vs {
            if rng.random_bool(p_follow) {
                follows.push(follow(u, v));
            }
        }
    }

    let mut posts: Vec<Post> = Vec::new();
    for k in 0..n_events {
        let id = format!("p{k:04}");
        let author = &vs[rng.random_range(0..nv)];
        let label = match rng.random_range(0..10) {
            0 => None,
            1..=3 => Some(false),
            _ => Some(true),
        };
        let r = rng.random_range(0..10);
        let rt = if r < 3 {
            None
        } else if r < 5 {
            Some((format!("q{k:04}"), author.clone()))
        } else if r < 8 || xs.is_empty() {
            let src = &vs[rng.random_range(0..nv)];
            Some((format!("q{k:04}"), src.clone()))
        } else {
            Some((format!("q{k:04}"), xs[rng.random_range(0..nx)].clone()))
        };
        // some retweets point at an earlier post that does exist
        let rt = rt.map(|(pid, a)| {
            let existing = posts.iter().find(|p| p.author_id == a && p.retweet_of.is_none());
            match existing {
                Some(p) if rng.random_bool(0.5) => (p.id.clone(), a),
                _ => (pid, a),
            }
        });
        posts.push(post(&id, author, k as i64, rt.as_ref().map(|(p, a)| (p.as_str(), a.as_str())), label));
    }
    for (k, x) in xs.iter().step_by(2).enumerate() {
        posts.push(post(&format!("xp{k}"), x, 5, None, Some(true)));
    }
    dataset(accounts, posts, follows, us.iter().map(|u| survey(u)).collect())
}
