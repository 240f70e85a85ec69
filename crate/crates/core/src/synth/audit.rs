use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{GroundTruth, RetweetCount, EMBEDDINGS_FILE, GROUND_TRUTH_FILE, LABELS_FILE};
use crate::embedding::load_embeddings;
use crate::error::{Error, Result};
use crate::model::{
    attach_labels, identify_influencers, ingest_corpus, CorpusPaths, Dataset, Dimension,
    InfluencerCriteria, LabelSource, DEFAULT_LABEL_THRESHOLD,
};

pub(super) fn uncivil_totals(ds: &Dataset) -> BTreeMap<Dimension, u64> {
    Dimension::ALL
        .iter()
        .map(|&d| {
            let n = (0..ds.posts().len())
                .filter(|&i| ds.is_uncivil(i, d, LabelSource::Machine))
                .count();
            (d, n as u64)
        })
        .collect()
}

pub(super) fn daily_uncivil(ds: &Dataset) -> BTreeMap<Dimension, Vec<u64>> {
    let days = ds.window().days();
    Dimension::ALL
        .iter()
        .map(|&d| {
            let mut counts = vec![0u64; days.len()];
            for (i, p) in ds.posts().iter().enumerate() {
                if ds.is_uncivil(i, d, LabelSource::Machine) {
                    let k = (p.day() - days[0]).num_days() as usize;
                    counts[k] += 1;
                }
            }
            (d, counts)
        })
        .collect()
}

/// Influencer id → dimension → (uncivil posts, all posts).
pub(super) fn densities(ds: &Dataset) -> BTreeMap<String, BTreeMap<Dimension, (u64, u64)>> {
    let mut out: BTreeMap<String, BTreeMap<Dimension, (u64, u64)>> = ds
        .influencers()
        .map(|a| (a.id.clone(), Dimension::ALL.iter().map(|&d| (d, (0, 0))).collect()))
        .collect();
    for (i, p) in ds.posts().iter().enumerate() {
        if let Some(per) = out.get_mut(&p.author_id) {
            for (&d, c) in per.iter_mut() {
                c.1 += 1;
                if ds.is_uncivil(i, d, LabelSource::Machine) {
                    c.0 += 1;
                }
            }
        }
    }
    out
}

pub(super) fn retweet_counts(ds: &Dataset) -> Vec<RetweetCount> {
    let mut m: BTreeMap<(String, String), u64> = BTreeMap::new();
    for p in ds.posts() {
        if let Some(rt) = &p.retweet_of {
            *m.entry((rt.author_id.clone(), p.author_id.clone())).or_insert(0) += 1;
        }
    }
    m.into_iter()
        .map(|((source, retweeter), count)| RetweetCount { source, retweeter, count })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, expected: &T, found: &T) {
        let passed = expected == found;
        let detail = if passed {
            String::new()
        } else {
            let mut d = format!("expected {expected:?}, found {found:?}");
            d.truncate(300);
            d
        };
        self.checks.push(AuditCheck {
            name: name.into(),
            passed,
            detail,
        });
    }
}

/// Re-reads a generated corpus from disk through the normal ingestion path
/// and recounts every quantity in its ground-truth manifest.
pub fn audit_corpus(dir: &Path) -> Result<AuditReport> {
    let truth_path = dir.join(GROUND_TRUTH_FILE);
    let text = std::fs::read_to_string(&truth_path)
        .map_err(|e| Error::io(format!("reading {}", truth_path.display()), e))?;
    let truth: GroundTruth = serde_json::from_str(&text)?;
    let ingested = ingest_corpus(&CorpusPaths::in_dir(dir), truth.window)?;
    let ds = attach_labels(&ingested.dataset, &dir.join(LABELS_FILE), DEFAULT_LABEL_THRESHOLD)?;
    let found_influencers: Vec<String> = identify_influencers(&ds, &InfluencerCriteria::default())
        .into_iter()
        .collect();
    let ds = ds.with_influencers(&found_influencers);
    let embeddings = load_embeddings(&dir.join(EMBEDDINGS_FILE), Some(truth.embedding.dim))?;
    let label_rows = crate::model::io::read_label_rows(&dir.join(LABELS_FILE))?;

    let mut r = AuditReport { checks: Vec::new() };
    r.check("no posts dropped by the window", &0, &ingested.dropped.posts_outside_window);
    r.check("account count", &truth.counts.accounts, &ds.accounts().len());
    r.check("post count", &truth.counts.posts, &ds.posts().len());
    r.check("follow count", &truth.counts.follows, &ds.follows().len());
    r.check("survey user count", &truth.counts.survey_users, &ds.survey_users().len());
    r.check("label row count", &truth.counts.label_rows, &label_rows.len());
    r.check("embedding count", &truth.counts.embeddings, &embeddings.len());
    r.check("every post embedded", &true, &ds.posts().iter().all(|p| embeddings.contains(&p.id)));
    r.check("influencer screen", &truth.influencers, &found_influencers);
    for s in &truth.spikes {
        let n = ds
            .posts()
            .iter()
            .enumerate()
            .filter(|(i, p)| {
                p.id.starts_with(&s.id_prefix)
                    && p.day() == s.date
                    && ds.is_uncivil(*i, s.dimension, LabelSource::Machine)
            })
            .count() as u64;
        r.check(&format!("spike {} {} posts", s.date, s.dimension), &s.magnitude, &n);
    }
    r.check("uncivil totals", &truth.uncivil_totals, &uncivil_totals(&ds));
    r.check("daily uncivil series", &truth.daily_uncivil, &daily_uncivil(&ds));
    let planted: BTreeMap<String, BTreeMap<Dimension, (u64, u64)>> = truth
        .densities
        .iter()
        .map(|(id, per)| (id.clone(), per.iter().map(|(&d, t)| (d, (t.uncivil, t.total))).collect()))
        .collect();
    r.check("influencer densities", &planted, &densities(&ds));
    r.check("retweet matrix", &truth.retweets, &retweet_counts(&ds));
    r.check("cluster sizes", &truth.cluster_sizes, &uncivil_totals(&ds));
    let mut per_coder: BTreeMap<String, std::collections::BTreeSet<String>> = BTreeMap::new();
    for a in ds.annotations() {
        per_coder.entry(a.coder_id.clone()).or_default().insert(a.post_id.clone());
    }
    let sizes: Vec<usize> = truth
        .annotation
        .coders
        .iter()
        .map(|c| per_coder.get(c).map_or(0, |s| s.len()))
        .collect();
    let distinct = per_coder.values().flatten().collect::<std::collections::BTreeSet<_>>().len();
    r.check("annotation distinct posts", &truth.annotation.distinct_posts, &distinct);
    r.check(
        "annotation overlap",
        &truth.annotation.overlap,
        &(sizes.iter().sum::<usize>() - distinct),
    );
    Ok(r)
}
