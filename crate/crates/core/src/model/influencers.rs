use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::dataset::Dataset;
use super::types::Account;

/// Political and media keywords used to screen profile descriptions.
pub const DEFAULT_KEYWORDS: &[&str] = &[
    // general
    "política", "político", "political", "politics", "democracia", "democracy",
    // election
    "bolsonaro", "bolsonarista", "lula", "lulista", "candidato", "partido", "presidente",
    // public sector
    "federal", "conselho nacional de", "ministro", "senador", "deputado", "governador",
    "prefeito", "vereador", "secretário",
    // ideology
    "conservador", "conservative", "liberal", "liberalismo", "libertairia", "esquerdopata",
    "esquerda", "direita", "direitista", "comunista", "comunismo", "nacionalista", "patriota",
    "globalista", "feminista", "armamentista", "fascista", "racist", "colonialista",
    "socialista", "ativista", "progressista",
    // topics
    "aborto", "mulher", "preta", "lgbt", "gay", "bissexualismo", "homophobic", "catílico",
    "jesus", "deus", "ambiente", "clima", "justiça", "imigrante", "foreigner", "economia",
    "bem-estar", "pobre", "desigualdade",
    // media aggregators
    "jornalista", "journalist", "correspondent", "repórter", "comandante", "commentator",
    "comentarista", "influencer", "news", "semanal",
];

pub const DEFAULT_LOCATIONS: &[&str] = &[
    "brazil", "brasil", "são paulo", "rio de janeiro", "brasília", "belo horizonte",
    "salvador", "fortaleza", "recife", "porto alegre", "curitiba", "manaus", "belém",
    "goiânia", "florianópolis", "natal", "vitória",
];

/// Lowercases and strips diacritics: `"Política"` → `"politica"`.
pub fn fold(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

fn fold_handle(h: &str) -> String {
    fold(h.trim().trim_start_matches('@'))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InfluencerCriteria {
    pub keywords: Vec<String>,
    pub min_followers: u64,
    /// Accepted locations; an account with no location passes.
    pub locations: Vec<String>,
    /// Party, politician and media handles admitted without a keyword match.
    pub allowlist: Vec<String>,
}

impl Default for InfluencerCriteria {
    fn default() -> Self {
        InfluencerCriteria {
            keywords: DEFAULT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            min_followers: 1000,
            locations: DEFAULT_LOCATIONS.iter().map(|s| s.to_string()).collect(),
            allowlist: Vec::new(),
        }
    }
}

struct Folded {
    keywords: Vec<String>,
    locations: BTreeSet<String>,
    allowlist: BTreeSet<String>,
}

impl InfluencerCriteria {
    fn folded(&self) -> Folded {
        Folded {
            keywords: self
                .keywords
                .iter()
                .map(|k| fold(k))
                .filter(|k| !k.is_empty())
                .collect(),
            locations: self.locations.iter().map(|l| fold(l.trim())).collect(),
            allowlist: self.allowlist.iter().map(|h| fold_handle(h)).collect(),
        }
    }

    pub fn accepts(&self, account: &Account) -> bool {
        self.folded().accepts_with(account, self.min_followers)
    }
}

impl Folded {
    fn location_ok(&self, location: Option<&str>) -> bool {
        let Some(loc) = location else { return true };
        let loc = fold(loc.trim());
        if loc.is_empty() || self.locations.contains(&loc) {
            return true;
        }
        loc.split([',', '/', '-', '|'])
            .map(str::trim)
            .any(|part| self.locations.contains(part))
    }

    fn accepts_with(&self, account: &Account, min_followers: u64) -> bool {
        if account.follower_count < min_followers {
            return false;
        }
        let profile = fold(&account.profile_text);
        let political = self.keywords.iter().any(|k| profile.contains(k.as_str()))
            || self.allowlist.contains(&fold_handle(&account.handle));
        political && self.location_ok(account.location.as_deref())
    }
}

/// Ids of accounts passing the follower, political-content and location screens.
pub fn identify_influencers(dataset: &Dataset, criteria: &InfluencerCriteria) -> BTreeSet<String> {
    let folded = criteria.folded();
    dataset
        .accounts()
        .iter()
        .filter(|a| folded.accepts_with(a, criteria.min_followers))
        .map(|a| a.id.clone())
        .collect()
}

/// [`identify_influencers`] plus the revision with `is_influencer` marked.
pub fn mark_influencers(dataset: &Dataset, criteria: &InfluencerCriteria) -> (BTreeSet<String>, Dataset) {
    let ids = identify_influencers(dataset, criteria);
    let revision = dataset.with_influencers(&ids);
    (ids, revision)
}
