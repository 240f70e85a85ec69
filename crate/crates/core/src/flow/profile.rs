use std::collections::BTreeMap;

use serde::Serialize;

use super::motifs::{Motif, MotifCensus};
use crate::model::{AccountType, Dataset};

/// One histogram bar. For direct flow `source` is absent and `retweeter`
/// holds the poster's type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ProfileRow {
    pub motif: Motif,
    pub source_type: Option<AccountType>,
    pub disseminator_type: AccountType,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IdentityProfile {
    pub direct: BTreeMap<AccountType, u64>,
    pub two_step: BTreeMap<(AccountType, AccountType), u64>,
    pub mixed: BTreeMap<(AccountType, AccountType), u64>,
}

impl IdentityProfile {
    pub fn rows(&self) -> Vec<ProfileRow> {
        let mut rows: Vec<ProfileRow> = self
            .direct
            .iter()
            .map(|(&t, &count)| ProfileRow {
                motif: Motif::Direct,
                source_type: None,
                disseminator_type: t,
                count,
            })
            .collect();
        for (motif, map) in [(Motif::TwoStep, &self.two_step), (Motif::Mixed, &self.mixed)] {
            rows.extend(map.iter().map(|(&(s, r), &count)| ProfileRow {
                motif,
                source_type: Some(s),
                disseminator_type: r,
                count,
            }));
        }
        rows
    }

    /// Share of a motif's exposures carried by each disseminator type.
    pub fn disseminator_shares(&self, motif: Motif) -> BTreeMap<AccountType, f64> {
        let mut by_type: BTreeMap<AccountType, u64> = BTreeMap::new();
        match motif {
            Motif::Direct => by_type = self.direct.clone(),
            Motif::TwoStep | Motif::Mixed => {
                let map = if motif == Motif::TwoStep { &self.two_step } else { &self.mixed };
                for (&(_, r), &c) in map {
                    *by_type.entry(r).or_insert(0) += c;
                }
            }
        }
        let total: u64 = by_type.values().sum();
        by_type
            .into_iter()
            .map(|(t, c)| (t, c as f64 / total as f64))
            .collect()
    }
}

/// Account-type histograms of the census, weighted by exposures. Accounts
/// missing from the dataset fall in the unknown bucket.
pub fn motif_identity_profile(census: &MotifCensus, dataset: &Dataset) -> IdentityProfile {
    let kind = |id: &str| dataset.account(id).map_or(AccountType::Unknown, |a| a.account_type);
    let mut p = IdentityProfile::default();
    for (id, &c) in &census.direct {
        *p.direct.entry(kind(id)).or_insert(0) += c;
    }
    for ((a, v), &c) in &census.two_step {
        *p.two_step.entry((kind(a), kind(v))).or_insert(0) += c;
    }
    for ((a, v), &c) in &census.mixed {
        *p.mixed.entry((kind(a), kind(v))).or_insert(0) += c;
    }
    p
}
