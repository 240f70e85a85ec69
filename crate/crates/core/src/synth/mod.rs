//! Seeded synthetic corpora with known ground truth: planted spikes, planted
//! per-influencer incivility rates, co-followership-biased retweeting, and
//! embeddings that separate labeled posts by a tunable margin.

mod audit;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::model::io::{write_csv, AccountRecord, PostRecord, SurveyRecord};
use crate::model::{
    attach_label_rows, Account, AccountType, CorpusPaths, Dataset, Dimension, FollowEdge,
    Identity, LabelRow, Post, RetweetOf, StudyWindow, SurveyUser, DEFAULT_LABEL_THRESHOLD,
    MACHINE_CODER,
};

pub use audit::{audit_corpus, AuditCheck, AuditReport};

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const LABELS_FILE: &str = "labels.csv";
pub const EMBEDDINGS_FILE: &str = "embeddings.jsonl";
pub const CODERS: [&str; 2] = ["coder_a", "coder_b"];

/// Extra posts labeled uncivil in one dimension on one day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spike {
    /// Zero-based day within the window.
    pub day: usize,
    pub dimension: Dimension,
    pub magnitude: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub dim: usize,
    pub sigma: f64,
    /// Shift along the dimension's axis for posts labeled in that dimension.
    pub delta: f64,
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        EmbeddingSpec {
            dim: 16,
            sigma: 1.0,
            delta: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotationSpec {
    pub per_coder: usize,
    /// Posts seen by both coders.
    pub overlap: usize,
    /// Probability that a coder flips the planted label.
    pub coder_noise: f64,
    /// Target share of annotated posts that are uncivil in some dimension.
    pub positive_share: f64,
}

impl Default for AnnotationSpec {
    fn default() -> Self {
        AnnotationSpec {
            per_coder: 500,
            overlap: 100,
            coder_noise: 0.03,
            positive_share: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub start_date: NaiveDate,
    pub n_days: usize,
    pub n_influencers: usize,
    /// Followed accounts that fail the influencer screen.
    pub n_decoys: usize,
    /// Non-influencer accounts that influencers retweet.
    pub n_outside: usize,
    pub n_survey_users: usize,
    /// Mean posts per influencer per day before activity scaling.
    pub posts_per_day: f64,
    pub retweet_fraction: f64,
    /// Share of retweets that are self-retweets.
    pub self_retweet_fraction: f64,
    /// Per-post probability of incivility before per-influencer scaling.
    pub baseline_rates: BTreeMap<Dimension, f64>,
    pub spikes: Vec<Spike>,
    /// Follow probability within a block.
    pub follow_probability: f64,
    /// Cross-block follow probability relative to within-block.
    pub block_mixing: f64,
    /// Probability that a retweet source is drawn in proportion to shared
    /// survey followers rather than uniformly.
    pub motif_excess: f64,
    /// Probability of the left block for influencers in each IMP-rate quartile.
    pub left_share_by_quartile: [f64; 4],
    pub type_mix: BTreeMap<AccountType, f64>,
    pub embedding: EmbeddingSpec,
    pub annotation: AnnotationSpec,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 42,
            start_date: NaiveDate::from_ymd_opt(2022, 8, 1).unwrap(),
            n_days: 92,
            n_influencers: 60,
            n_decoys: 15,
            n_outside: 10,
            n_survey_users: 300,
            posts_per_day: 0.6,
            retweet_fraction: 0.4,
            self_retweet_fraction: 0.05,
            baseline_rates: BTreeMap::from([
                (Dimension::Imp, 0.15),
                (Dimension::Phavpr, 0.06),
                (Dimension::Hsst, 0.06),
                (Dimension::Threat, 0.05),
            ]),
            spikes: vec![Spike {
                day: 62,
                dimension: Dimension::Imp,
                magnitude: 150,
            }],
            follow_probability: 0.15,
            block_mixing: 0.2,
            motif_excess: 0.6,
            left_share_by_quartile: [0.2, 0.4, 0.6, 0.8],
            type_mix: BTreeMap::from([
                (AccountType::Politician, 0.3),
                (AccountType::Media, 0.3),
                (AccountType::Individual, 0.4),
            ]),
            embedding: EmbeddingSpec::default(),
            annotation: AnnotationSpec::default(),
        }
    }
}

fn field(name: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: format!("synth.{name}"),
        reason: reason.into(),
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(field(name, format!("{p} is not a probability")))
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("n_days", self.n_days),
            ("n_influencers", self.n_influencers),
            ("n_survey_users", self.n_survey_users),
        ] {
            if n == 0 {
                return Err(field(name, "must be positive"));
            }
        }
        if self.n_influencers < 2 {
            return Err(field("n_influencers", "at least two influencers are needed"));
        }
        if !(self.posts_per_day.is_finite() && self.posts_per_day >= 0.0) {
            return Err(field("posts_per_day", "must be a finite non-negative rate"));
        }
        check_prob("retweet_fraction", self.retweet_fraction)?;
        check_prob("self_retweet_fraction", self.self_retweet_fraction)?;
        check_prob("follow_probability", self.follow_probability)?;
        check_prob("block_mixing", self.block_mixing)?;
        check_prob("motif_excess", self.motif_excess)?;
        for (q, p) in self.left_share_by_quartile.iter().enumerate() {
            check_prob(&format!("left_share_by_quartile[{q}]"), *p)?;
        }
        for (d, p) in &self.baseline_rates {
            check_prob(&format!("baseline_rates.{d}"), *p)?;
        }
        for (t, w) in &self.type_mix {
            if *t == AccountType::Unknown {
                return Err(field("type_mix", "influencer types must be politician, media or individual"));
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(field("type_mix", format!("weight for {t} must be non-negative")));
            }
        }
        if self.type_mix.values().sum::<f64>() <= 0.0 {
            return Err(field("type_mix", "weights must not all be zero"));
        }
        for (i, s) in self.spikes.iter().enumerate() {
            if s.day >= self.n_days {
                return Err(field(
                    &format!("spikes[{i}].day"),
                    format!("day {} outside a {}-day window", s.day, self.n_days),
                ));
            }
        }
        let e = &self.embedding;
        if e.dim < Dimension::ALL.len() {
            return Err(field("embedding.dim", "needs one axis per dimension (at least 4)"));
        }
        if !(e.sigma.is_finite() && e.sigma > 0.0) {
            return Err(field("embedding.sigma", "must be positive"));
        }
        if !(e.delta.is_finite() && e.delta >= 0.0) {
            return Err(field("embedding.delta", "must be non-negative"));
        }
        let a = &self.annotation;
        check_prob("annotation.coder_noise", a.coder_noise)?;
        check_prob("annotation.positive_share", a.positive_share)?;
        if a.overlap > a.per_coder {
            return Err(field("annotation.overlap", "cannot exceed per_coder"));
        }
        Ok(())
    }

    pub fn window(&self) -> StudyWindow {
        let start = Utc.from_utc_datetime(&self.start_date.and_hms_opt(0, 0, 0).unwrap());
        StudyWindow {
            start,
            end: start + Duration::days(self.n_days as i64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTruth {
    pub date: NaiveDate,
    pub dimension: Dimension,
    pub magnitude: u64,
    /// Id prefix shared by the spike's posts.
    pub id_prefix: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTruth {
    /// Planted per-post probability.
    pub rate: f64,
    pub uncivil: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RetweetCount {
    pub source: String,
    pub retweeter: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifExpectation {
    pub motif_excess: f64,
    pub z_mixed_positive: bool,
    pub z_two_step_negative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub accounts: usize,
    pub posts: usize,
    pub follows: usize,
    pub survey_users: usize,
    pub label_rows: usize,
    pub embeddings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationTruth {
    pub coders: Vec<String>,
    pub per_coder: usize,
    pub overlap: usize,
    pub distinct_posts: usize,
}

/// Everything the generator planted, recounted from what it emitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub window: StudyWindow,
    pub counts: CorpusCounts,
    pub influencers: Vec<String>,
    pub decoys: Vec<String>,
    pub outside: Vec<String>,
    /// Influencer id → block (0 = left-aligned, 1 = right-aligned).
    pub blocks: BTreeMap<String, u8>,
    pub spikes: Vec<SpikeTruth>,
    pub uncivil_totals: BTreeMap<Dimension, u64>,
    pub daily_uncivil: BTreeMap<Dimension, Vec<u64>>,
    pub densities: BTreeMap<String, BTreeMap<Dimension, DensityTruth>>,
    /// Every retweet, unfiltered, as source → retweeter counts.
    pub retweets: Vec<RetweetCount>,
    pub motif_expectation: MotifExpectation,
    pub left_share_by_quartile: [f64; 4],
    /// Posts labeled uncivil per dimension, i.e. members of the shifted cluster.
    pub cluster_sizes: BTreeMap<Dimension, u64>,
    pub embedding: EmbeddingSpec,
    pub annotation: AnnotationTruth,
}

/// A generated corpus held in memory.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub spec: SynthSpec,
    /// Influencers marked, machine labels and human annotations attached.
    pub dataset: Dataset,
    pub label_rows: Vec<LabelRow>,
    pub embeddings: EmbeddingStore,
    pub truth: GroundTruth,
}

const POLITICIAN_PROFILES: &[&str] = &[
    "Deputado federal pelo povo",
    "Senador da República",
    "Vereador e pai de família",
    "Candidato a governador",
    "Prefeito, trabalho e fé",
];
const MEDIA_PROFILES: &[&str] = &[
    "Jornalista de política",
    "Repórter em Brasília",
    "Comentarista político na TV",
    "Portal de news independente",
];
const INDIVIDUAL_PROFILES: &[&str] = &[
    "Ativista e professora",
    "Patriota, conservador",
    "Progressista. Democracia sempre",
    "Influencer da esquerda",
];
const LOCATIONS: &[Option<&str>] = &[
    Some("Brasília, Brasil"),
    Some("São Paulo"),
    Some("Rio de Janeiro - RJ"),
    Some("Recife, PE"),
    None,
];

fn pick<'a, T>(rng: &mut ChaCha8Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

fn pick_weighted<T: Copy>(rng: &mut ChaCha8Rng, items: &[(T, f64)]) -> T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut x = rng.random_range(0.0..total);
    for &(t, w) in items {
        if x < w {
            return t;
        }
        x -= w;
    }
    items.last().unwrap().0
}

fn round4(p: f64) -> f64 {
    (p * 1e4).round() / 1e4
}

struct Influencer {
    id: String,
    block: u8,
    activity: f64,
    rates: BTreeMap<Dimension, f64>,
}

fn demographics(rng: &mut ChaCha8Rng) -> BTreeMap<String, serde_json::Value> {
    use serde_json::json;
    let mut m = BTreeMap::new();
    m.insert("age".into(), json!(rng.random_range(18..=80)));
    m.insert("gender".into(), json!(pick(rng, &["female", "male"])));
    m.insert(
        "ethnicity".into(),
        json!(pick(rng, &["white", "brown", "black", "asian", "indigenous"])),
    );
    m.insert(
        "religion".into(),
        json!(pick(rng, &["catholic", "evangelical", "none", "other"])),
    );
    m.insert("income".into(), json!(pick(rng, &["low", "middle", "high"])));
    m.insert(
        "education".into(),
        json!(pick(rng, &["primary", "secondary", "higher"])),
    );
    m
}

/// Generates a corpus. Identical specs give identical corpora.
pub fn generate(spec: &SynthSpec) -> Result<SynthCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let window = spec.window();
    let rate = |d: Dimension| spec.baseline_rates.get(&d).copied().unwrap_or(0.0);

    // influencers, with blocks assigned by IMP-rate quartile
    let types: Vec<(AccountType, f64)> = spec.type_mix.iter().map(|(t, w)| (*t, *w)).collect();
    let mut infl: Vec<Influencer> = (0..spec.n_influencers)
        .map(|i| Influencer {
            id: format!("inf{i:03}"),
            block: 0,
            activity: rng.random_range(0.5..1.5),
            rates: Dimension::ALL
                .iter()
                .map(|&d| (d, (rate(d) * rng.random_range(0.2..1.8)).min(1.0)))
                .collect(),
        })
        .collect();
    let mut by_imp: Vec<usize> = (0..infl.len()).collect();
    by_imp.sort_by(|&a, &b| infl[a].rates[&Dimension::Imp].total_cmp(&infl[b].rates[&Dimension::Imp]).then(a.cmp(&b)));
    for (rank, &i) in by_imp.iter().enumerate() {
        let q = rank * 4 / infl.len();
        infl[i].block = if rng.random_bool(spec.left_share_by_quartile[q]) { 0 } else { 1 };
    }

    let mut accounts = Vec::new();
    for (i, inf) in infl.iter().enumerate() {
        let kind = pick_weighted(&mut rng, &types);
        let profile = match kind {
            AccountType::Politician => pick(&mut rng, POLITICIAN_PROFILES),
            AccountType::Media => pick(&mut rng, MEDIA_PROFILES),
            _ => pick(&mut rng, INDIVIDUAL_PROFILES),
        };
        let mut identities = BTreeSet::new();
        if inf.block == 0 {
            identities.insert(Identity::Left);
            if rng.random_bool(0.7) {
                identities.insert(Identity::LulaCamp);
            }
        } else {
            identities.insert(Identity::Right);
            if rng.random_bool(0.7) {
                identities.insert(Identity::BolsonaroCamp);
            }
        }
        for (idn, p) in [
            (Identity::Women, 0.3),
            (Identity::Black, 0.2),
            (Identity::Lgbtq, 0.1),
            (Identity::Religious, 0.2),
        ] {
            if rng.random_bool(p) {
                identities.insert(idn);
            }
        }
        accounts.push(Account {
            id: inf.id.clone(),
            handle: format!("{}{i:03}", kind.as_str()),
            account_type: kind,
            // the first influencer sits exactly on the follower threshold
            follower_count: if i == 0 { 1_000 } else { rng.random_range(1_000..=250_000) },
            profile_text: profile.to_string(),
            location: pick(&mut rng, LOCATIONS).map(String::from),
            identities,
            is_influencer: false,
        });
    }
    let decoys: Vec<String> = (0..spec.n_decoys).map(|i| format!("dec{i:03}")).collect();
    for (i, id) in decoys.iter().enumerate() {
        let (profile, followers, location) = match i % 3 {
            0 => ("Amo futebol, música e viagens", rng.random_range(5_000..50_000), Some("Brasil")),
            1 => ("Jornalista de política", rng.random_range(100..1_000), Some("São Paulo")),
            _ => ("Comentarista político", rng.random_range(5_000..50_000), Some("Lisboa, Portugal")),
        };
        accounts.push(Account {
            id: id.clone(),
            handle: format!("decoy{i:03}"),
            account_type: AccountType::Individual,
            follower_count: followers,
            profile_text: profile.into(),
            location: location.map(String::from),
            identities: BTreeSet::new(),
            is_influencer: false,
        });
    }
    let outside: Vec<String> = (0..spec.n_outside).map(|i| format!("ext{i:03}")).collect();
    for (i, id) in outside.iter().enumerate() {
        accounts.push(Account {
            id: id.clone(),
            handle: format!("outside{i:03}"),
            account_type: AccountType::Individual,
            follower_count: rng.random_range(10..900),
            profile_text: "Perfil pessoal".into(),
            location: None,
            identities: BTreeSet::new(),
            is_influencer: false,
        });
    }
    let mut survey = Vec::new();
    let mut user_blocks = Vec::new();
    for i in 0..spec.n_survey_users {
        let id = format!("usr{i:04}");
        let block: u8 = if rng.random_bool(0.5) { 0 } else { 1 };
        user_blocks.push(block);
        accounts.push(Account {
            id: id.clone(),
            handle: format!("user{i:04}"),
            account_type: AccountType::Individual,
            follower_count: rng.random_range(0..500),
            profile_text: String::new(),
            location: None,
            identities: BTreeSet::new(),
            is_influencer: false,
        });
        let ideology = if rng.random_bool(0.9) {
            Some(if block == 0 { rng.random_range(0..=4) } else { rng.random_range(6..=10) })
        } else {
            None
        };
        survey.push(SurveyUser {
            id,
            demographics: demographics(&mut rng),
            ideology,
        });
    }

    // two-block follow structure
    let mut follows = Vec::new();
    let mut followers: Vec<Vec<usize>> = vec![Vec::new(); infl.len()];
    for (u, s) in survey.iter().enumerate() {
        for (v, inf) in infl.iter().enumerate() {
            let p = spec.follow_probability * if inf.block == user_blocks[u] { 1.0 } else { spec.block_mixing };
            if rng.random_bool(p) {
                follows.push(FollowEdge {
                    follower_id: s.id.clone(),
                    followee_id: inf.id.clone(),
                });
                followers[v].push(u);
            }
        }
        for d in &decoys {
            if rng.random_bool(0.05) {
                follows.push(FollowEdge {
                    follower_id: s.id.clone(),
                    followee_id: d.clone(),
                });
            }
        }
    }
    let shared = |a: usize, b: usize| followers[a].iter().filter(|u| followers[b].binary_search(u).is_ok()).count() as f64;
    let common: Vec<Vec<f64>> = (0..infl.len())
        .map(|a| (0..infl.len()).map(|b| if a == b { 0.0 } else { shared(a, b) }).collect())
        .collect();

    // posts, day by day; retweets reference originals from earlier days
    let mut posts: Vec<Post> = Vec::new();
    let mut labels: Vec<BTreeMap<Dimension, bool>> = Vec::new();
    let mut originals: Vec<Vec<String>> = vec![Vec::new(); infl.len()];
    let mut external_refs = 0usize;
    let mut counter = 0usize;
    for day in 0..spec.n_days {
        let day_start = window.start + Duration::days(day as i64);
        let mut todays: Vec<(usize, String)> = Vec::new();
        for (v, inf) in infl.iter().enumerate() {
            let lambda = spec.posts_per_day * inf.activity;
            let n = if lambda > 0.0 {
                Poisson::new(lambda).map_err(|e| field("posts_per_day", e.to_string()))?.sample(&mut rng) as usize
            } else {
                0
            };
            for _ in 0..n {
                let id = format!("p{counter:06}");
                counter += 1;
                let ts = day_start + Duration::seconds(rng.random_range(0..86_400));
                let retweet_of = if rng.random_bool(spec.retweet_fraction) {
                    let src = if rng.random_bool(spec.self_retweet_fraction) {
                        Some(v)
                    } else if rng.random_bool(spec.motif_excess) && common[v].iter().any(|&c| c > 0.0) {
                        let w: Vec<(usize, f64)> = common[v].iter().copied().enumerate().collect();
                        Some(pick_weighted(&mut rng, &w))
                    } else {
                        let k = rng.random_range(0..infl.len() - 1 + outside.len());
                        if k < infl.len() - 1 {
                            Some(if k >= v { k + 1 } else { k })
                        } else {
                            None
                        }
                    };
                    let (author, post_id) = match src {
                        Some(a) if !originals[a].is_empty() => {
                            (infl[a].id.clone(), pick(&mut rng, &originals[a]).clone())
                        }
                        Some(a) => {
                            external_refs += 1;
                            (infl[a].id.clone(), format!("old{external_refs:06}"))
                        }
                        None => {
                            external_refs += 1;
                            (pick(&mut rng, &outside).clone(), format!("old{external_refs:06}"))
                        }
                    };
                    Some(RetweetOf { post_id, author_id: author })
                } else {
                    None
                };
                let lab: BTreeMap<Dimension, bool> = Dimension::ALL
                    .iter()
                    .map(|&d| (d, rng.random_bool(inf.rates[&d])))
                    .collect();
                if retweet_of.is_none() {
                    todays.push((v, id.clone()));
                }
                posts.push(Post {
                    text: format!("mensagem {id} de {}", inf.id),
                    id,
                    author_id: inf.id.clone(),
                    timestamp: ts,
                    retweet_of,
                    machine: Default::default(),
                });
                labels.push(lab);
            }
        }
        for (v, id) in todays {
            originals[v].push(id);
        }
    }
    let mut spike_truth = Vec::new();
    for (s, spike) in spec.spikes.iter().enumerate() {
        let prefix = format!("spk{s:02}-");
        let day_start = window.start + Duration::days(spike.day as i64);
        for k in 0..spike.magnitude {
            let v = rng.random_range(0..infl.len());
            let id = format!("{prefix}{k:05}");
            posts.push(Post {
                text: format!("mensagem {id} de {}", infl[v].id),
                id,
                author_id: infl[v].id.clone(),
                timestamp: day_start + Duration::seconds(rng.random_range(0..86_400)),
                retweet_of: None,
                machine: Default::default(),
            });
            labels.push(Dimension::ALL.iter().map(|&d| (d, d == spike.dimension)).collect());
        }
        spike_truth.push(SpikeTruth {
            date: day_start.date_naive(),
            dimension: spike.dimension,
            magnitude: spike.magnitude,
            id_prefix: prefix,
        });
    }

    // machine rows carry the planted labels
    let mut label_rows = Vec::new();
    for (p, lab) in posts.iter().zip(&labels) {
        for (&d, &value) in lab {
            let prob = if value {
                round4(DEFAULT_LABEL_THRESHOLD + rng.random_range(0.0..1.0) * (1.0 - DEFAULT_LABEL_THRESHOLD))
            } else {
                round4(rng.random_range(0.0..1.0) * 0.6999)
            };
            label_rows.push(LabelRow {
                post_id: p.id.clone(),
                dimension: d.to_string(),
                coder_id: MACHINE_CODER.into(),
                value: if value { "1" } else { "0" }.into(),
                prob: Some(format!("{prob}")),
            });
        }
    }

    // human coders: two overlapping samples, enriched for uncivil posts
    let a = &spec.annotation;
    let distinct = (2 * a.per_coder - a.overlap).min(posts.len());
    let mut positive: Vec<usize> = (0..posts.len()).filter(|&i| labels[i].values().any(|&x| x)).collect();
    let mut negative: Vec<usize> = (0..posts.len()).filter(|&i| !labels[i].values().any(|&x| x)).collect();
    positive.shuffle(&mut rng);
    negative.shuffle(&mut rng);
    let mut n_pos = ((distinct as f64 * a.positive_share).round() as usize).min(positive.len());
    let n_neg = (distinct - n_pos).min(negative.len());
    n_pos = (distinct - n_neg).min(positive.len());
    let mut sample: Vec<usize> = positive[..n_pos].iter().chain(&negative[..n_neg]).copied().collect();
    sample.shuffle(&mut rng);
    let first = a.per_coder.min(sample.len());
    let second_start = sample.len().saturating_sub(a.per_coder);
    for (coder, range) in [(CODERS[0], 0..first), (CODERS[1], second_start..sample.len())] {
        for &i in &sample[range] {
            for (&d, &value) in &labels[i] {
                let flipped = value ^ rng.random_bool(a.coder_noise);
                label_rows.push(LabelRow {
                    post_id: posts[i].id.clone(),
                    dimension: d.to_string(),
                    coder_id: coder.into(),
                    value: if flipped { "1" } else { "0" }.into(),
                    prob: None,
                });
            }
        }
    }

    // embeddings: isotropic noise plus a shift along each labeled axis
    let e = &spec.embedding;
    let noise = Normal::new(0.0, e.sigma).map_err(|err| field("embedding.sigma", err.to_string()))?;
    let mut embeddings = EmbeddingStore::new(e.dim, "synthetic-isotropic")?;
    let mut cluster_sizes: BTreeMap<Dimension, u64> = Dimension::ALL.iter().map(|&d| (d, 0)).collect();
    let mut order: Vec<usize> = (0..posts.len()).collect();
    order.sort_by(|&x, &y| posts[x].id.cmp(&posts[y].id));
    for &i in &order {
        let mut v: Vec<f64> = (0..e.dim).map(|_| noise.sample(&mut rng)).collect();
        for (&d, &value) in &labels[i] {
            if value {
                v[d.index()] += e.delta;
                *cluster_sizes.get_mut(&d).unwrap() += 1;
            }
        }
        embeddings.insert(posts[i].id.clone(), &v)?;
    }

    let influencer_ids: Vec<String> = infl.iter().map(|i| i.id.clone()).collect();
    let (dataset, _) = Dataset::from_records(accounts, posts, follows, survey, window)?;
    let dataset = attach_label_rows(&dataset, &label_rows, DEFAULT_LABEL_THRESHOLD)?;
    let dataset = dataset.with_influencers(&influencer_ids);

    let truth = GroundTruth {
        seed: spec.seed,
        window,
        counts: CorpusCounts {
            accounts: dataset.accounts().len(),
            posts: dataset.posts().len(),
            follows: dataset.follows().len(),
            survey_users: dataset.survey_users().len(),
            label_rows: label_rows.len(),
            embeddings: embeddings.len(),
        },
        blocks: infl.iter().map(|i| (i.id.clone(), i.block)).collect(),
        spikes: spike_truth,
        uncivil_totals: audit::uncivil_totals(&dataset),
        daily_uncivil: audit::daily_uncivil(&dataset),
        densities: audit::densities(&dataset)
            .into_iter()
            .map(|(id, per)| {
                let inf = infl.iter().find(|i| i.id == id).unwrap();
                let per = per
                    .into_iter()
                    .map(|(d, (uncivil, total))| (d, DensityTruth { rate: inf.rates[&d], uncivil, total }))
                    .collect();
                (id, per)
            })
            .collect(),
        retweets: audit::retweet_counts(&dataset),
        motif_expectation: MotifExpectation {
            motif_excess: spec.motif_excess,
            z_mixed_positive: spec.motif_excess > 0.0,
            z_two_step_negative: spec.motif_excess > 0.0,
        },
        left_share_by_quartile: spec.left_share_by_quartile,
        cluster_sizes,
        embedding: spec.embedding.clone(),
        annotation: AnnotationTruth {
            coders: CODERS.iter().map(|s| s.to_string()).collect(),
            per_coder: a.per_coder,
            overlap: first + (sample.len() - second_start) - sample.len(),
            distinct_posts: sample.len(),
        },
        influencers: influencer_ids,
        decoys,
        outside,
    };
    Ok(SynthCorpus {
        spec: spec.clone(),
        dataset,
        label_rows,
        embeddings,
        truth,
    })
}

impl SynthCorpus {
    /// Writes the corpus files, `labels.csv`, `embeddings.jsonl` and
    /// `ground_truth.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        let paths = CorpusPaths::in_dir(dir);
        let ds = &self.dataset;
        crate::model::io::write_jsonl(&paths.accounts, ds.accounts().iter().map(AccountRecord::from))?;
        crate::model::io::write_jsonl(&paths.posts, ds.posts().iter().map(PostRecord::from))?;
        write_csv(&paths.follows, ds.follows())?;
        crate::model::io::write_jsonl(
            paths.survey.as_ref().expect("in_dir sets a survey path"),
            ds.survey_users().iter().map(|s| SurveyRecord {
                id: s.id.clone(),
                demographics: s.demographics.clone(),
                ideology: s.ideology,
            }),
        )?;
        write_csv(&dir.join(LABELS_FILE), &self.label_rows)?;
        self.embeddings.write(&dir.join(EMBEDDINGS_FILE))?;
        let json = serde_json::to_string_pretty(&self.truth)?;
        std::fs::write(dir.join(GROUND_TRUTH_FILE), json + "\n")
            .map_err(|e| Error::io(format!("writing {}", dir.join(GROUND_TRUTH_FILE).display()), e))
    }
}
