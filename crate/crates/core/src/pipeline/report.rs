use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use chrono::NaiveDate;
use serde::Serialize;

use super::config::PipelineConfig;
use super::output::{ensure_dir, write_json, write_text};
use super::stages::{AudienceOutcome, CoderAgreement, TrainOutcome};
use super::{Corpus, Pipeline};
use crate::classifier::{BinaryMetrics, Confusion};
use crate::error::{Error, Result};
use crate::flow::{Motif, MotifCounts, NullModelResult};
use crate::model::io::read_label_rows;
use crate::model::{dataset_summary, AccountType, Dimension, DropCounts, SummaryStats, MACHINE_CODER};
use crate::synth::{GroundTruth, GROUND_TRUTH_FILE};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierDay {
    pub date: NaiveDate,
    pub count: u64,
    pub cooks_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsSection {
    pub total: u64,
    pub peak_date: Option<NaiveDate>,
    pub gcv_lambda: f64,
    pub gcv_edf: f64,
    pub trend_edf: f64,
    pub outliers: Vec<OutlierDay>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRow {
    pub rank: usize,
    pub account_id: String,
    pub account_type: AccountType,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowSection {
    pub nodes: usize,
    pub retweets: u64,
    pub observed: MotifCounts,
    pub null: NullModelResult,
    pub pagerank_iterations: usize,
    pub pagerank_top: Vec<RankedRow>,
    /// Share of each motif's exposures carried by each disseminator type.
    pub disseminator_shares: BTreeMap<Motif, BTreeMap<AccountType, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierSection {
    pub n_train: usize,
    pub positives: usize,
    pub folds: usize,
    pub confusion: Confusion,
    pub metrics: BinaryMetrics,
    pub agreement: Option<CoderAgreement>,
    /// Fitted model against the machine labels shipped with the input.
    pub against_input_labels: Option<BinaryMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub dimension: Dimension,
    pub dynamics: DynamicsSection,
    pub flow: FlowSection,
    pub classifier: Option<ClassifierSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: PipelineConfig,
    pub summary: SummaryStats,
    pub dropped: DropCounts,
    pub influencers: usize,
    pub classified_dimensions: Vec<Dimension>,
    pub dimensions: Vec<DimensionReport>,
    pub audience: AudienceOutcome,
    /// Present when the input directory carries a generator manifest.
    pub ground_truth: Option<Vec<CrossCheck>>,
}

impl Report {
    pub fn dimension(&self, d: Dimension) -> Option<&DimensionReport> {
        self.dimensions.iter().find(|r| r.dimension == d)
    }

    pub fn cross_checks_passed(&self) -> bool {
        self.ground_truth.iter().flatten().all(|c| c.passed)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "civiscope report (seed {})", self.config.seed);
        let _ = writeln!(
            s,
            "corpus: {} accounts, {} influencers, {} posts, {} follows, {} survey users",
            self.summary.accounts, self.influencers, self.summary.posts, self.summary.follows, self.summary.survey_users
        );
        for r in &self.dimensions {
            let d = r.dimension;
            let _ = writeln!(s, "\n[{d}]");
            let dy = &r.dynamics;
            let _ = writeln!(
                s,
                "  uncivil posts: {}, GCV lambda {:.3e} (edf {:.1})",
                dy.total, dy.gcv_lambda, dy.gcv_edf
            );
            match dy.outliers.first() {
                Some(o) => {
                    let _ = writeln!(
                        s,
                        "  {} outlier days; strongest {} ({} posts, D = {:.3})",
                        dy.outliers.len(),
                        o.date,
                        o.count,
                        o.cooks_d
                    );
                }
                None => {
                    let _ = writeln!(s, "  no outlier days");
                }
            }
            for m in Motif::ALL {
                let z = r.flow.null.get(m);
                let zs = z.z.map_or("n/a".to_string(), |v| format!("{v:.2}"));
                let _ = writeln!(
                    s,
                    "  {:<8} observed {:>8}  null mean {:>10.1}  z {}",
                    m.as_str(),
                    z.observed,
                    z.mean,
                    zs
                );
            }
            if let Some(top) = r.flow.pagerank_top.first() {
                let _ = writeln!(s, "  top creator: {} ({}, {:.4})", top.account_id, top.account_type, top.score);
            }
            if let Some(c) = &r.classifier {
                match &c.skipped {
                    Some(why) => {
                        let _ = writeln!(s, "  classifier skipped: {why}");
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "  classifier: weighted F1 {:.3} over {} folds (n = {})",
                            c.metrics.weighted_f1, c.folds, c.n_train
                        );
                    }
                }
            }
        }
        for a in &self.audience.dimensions {
            for f in &a.qreg {
                if f.tau == 0.5 {
                    let _ = writeln!(
                        s,
                        "\n{}: median exposure slope on density {:.1} [{:.1}, {:.1}]",
                        a.dimension, f.beta1, f.beta1_ci.low, f.beta1_ci.high
                    );
                }
            }
        }
        if let Some(checks) = &self.ground_truth {
            let _ = writeln!(s, "\nground-truth cross-checks:");
            for c in checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                let _ = writeln!(s, "  {mark} {}: expected {}, found {}", c.name, c.expected, c.found);
            }
        }
        s
    }
}

fn check(name: impl Into<String>, expected: impl ToString, found: impl ToString, passed: bool) -> CrossCheck {
    CrossCheck {
        name: name.into(),
        expected: expected.to_string(),
        found: found.to_string(),
        passed,
    }
}

/// Minimum weighted F1 expected of a classifier on planted-separable data.
const PLANTED_F1: f64 = 0.95;

impl Pipeline {
    fn input_machine_labels(&self, d: Dimension) -> Result<BTreeMap<String, bool>> {
        let path = self.cfg.input.labels_path();
        if !path.exists() {
            return Ok(BTreeMap::new());
        }
        Ok(read_label_rows(&path)?
            .into_iter()
            .filter(|r| r.coder_id == MACHINE_CODER && r.dimension.parse::<Dimension>().ok() == Some(d))
            .map(|r| (r.post_id, r.value.trim() == "1"))
            .collect())
    }

    fn classifier_section(&self, corpus: &Corpus, d: Dimension) -> Result<Option<(ClassifierSection, Vec<PathBuf>)>> {
        if !self.cfg.input.embeddings_path().exists() {
            return Ok(None);
        }
        let store = self.embeddings()?;
        let outcome: TrainOutcome = match self.train_with(corpus, &store, d) {
            Ok(o) => o,
            Err(Error::InvalidInput(why)) => {
                return Ok(Some((
                    ClassifierSection {
                        n_train: 0,
                        positives: 0,
                        folds: self.cfg.classifier.folds,
                        confusion: Confusion::default(),
                        metrics: BinaryMetrics::from_confusion(&Confusion::default()),
                        agreement: None,
                        against_input_labels: None,
                        skipped: Some(why),
                    },
                    Vec::new(),
                )))
            }
            Err(e) => return Err(e),
        };
        let planted = self.input_machine_labels(d)?;
        let mut truth = Vec::new();
        let mut pred = Vec::new();
        for (id, &v) in &planted {
            if let Some(x) = store.get(id) {
                truth.push(v);
                pred.push(outcome.model.predict_proba(x) >= self.cfg.labels.threshold);
            }
        }
        let against = (!truth.is_empty()).then(|| BinaryMetrics::from_confusion(&Confusion::from_predictions(&truth, &pred)));
        Ok(Some((
            ClassifierSection {
                n_train: outcome.n_train,
                positives: outcome.positives,
                folds: outcome.eval.folds,
                confusion: outcome.eval.confusion,
                metrics: outcome.eval.metrics,
                agreement: outcome.agreement.clone(),
                against_input_labels: against,
                skipped: None,
            },
            outcome.artifacts,
        )))
    }

    fn cross_checks(&self, corpus: &Corpus, dims: &[DimensionReport]) -> Result<Option<Vec<CrossCheck>>> {
        let path = self.cfg.input.dir.join(GROUND_TRUTH_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let truth: GroundTruth = serde_json::from_str(&text)?;
        let mut checks = Vec::new();

        let planted: Vec<&String> = truth.influencers.iter().collect();
        let found: Vec<&String> = corpus.influencers.iter().collect();
        checks.push(check(
            "influencer set",
            format!("{} planted", planted.len()),
            format!("{} identified", found.len()),
            planted == found,
        ));

        for r in dims {
            let d = r.dimension;
            if !corpus.classified.contains(&d) {
                let expected = truth.uncivil_totals.get(&d).copied().unwrap_or(0);
                checks.push(check(
                    format!("{d} uncivil total"),
                    expected,
                    r.dynamics.total,
                    expected == r.dynamics.total,
                ));
            }
            for s in truth.spikes.iter().filter(|s| s.dimension == d) {
                let top = r.dynamics.outliers.first().map(|o| o.date);
                checks.push(check(
                    format!("{d} spike is the top outlier day"),
                    s.date,
                    top.map_or("none".to_string(), |t| t.to_string()),
                    top == Some(s.date),
                ));
            }
            if let Some(c) = r.classifier.as_ref().and_then(|c| c.against_input_labels.as_ref()) {
                checks.push(check(
                    format!("{d} classifier weighted F1 against planted labels"),
                    format!(">= {PLANTED_F1}"),
                    format!("{:.4}", c.weighted_f1),
                    c.weighted_f1 >= PLANTED_F1,
                ));
            }
        }

        let e = &truth.motif_expectation;
        if let Some(r) = dims.iter().find(|r| r.dimension == Dimension::Imp) {
            let zm = r.flow.null.mixed.z;
            let zt = r.flow.null.two_step.z;
            let fmt = |z: Option<f64>| z.map_or("n/a".to_string(), |v| format!("{v:.2}"));
            checks.push(check(
                "IMP mixed motif over-represented",
                if e.z_mixed_positive { "z > 0" } else { "z <= 0" },
                fmt(zm),
                zm.is_some_and(|z| (z > 0.0) == e.z_mixed_positive),
            ));
            checks.push(check(
                "IMP two-step motif under-represented",
                if e.z_two_step_negative { "z < 0" } else { "z >= 0" },
                fmt(zt),
                zt.is_some_and(|z| (z < 0.0) == e.z_two_step_negative),
            ));
        }
        Ok(Some(checks))
    }

    /// Runs every analysis stage and merges the results. `report.json` is a
    /// function of the inputs and the configuration only.
    pub fn report(&self) -> Result<(Report, Vec<PathBuf>)> {
        ensure_dir(&self.cfg.output.dir)?;
        let corpus = self.load()?;
        let mut artifacts = self.ingest(&corpus)?;
        artifacts.extend(self.influencers(&corpus)?);
        let kind = |id: &str| corpus.dataset.account(id).map_or(AccountType::Unknown, |a| a.account_type);

        let mut dims = Vec::new();
        for &d in &self.cfg.dimensions {
            let (dy, files) = self.dynamics(&corpus, d)?;
            artifacts.extend(files);
            let peak = dy
                .series
                .counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .filter(|(_, &c)| c > 0)
                .map(|(i, _)| dy.series.dates[i]);
            let dynamics = DynamicsSection {
                total: dy.series.counts.iter().sum(),
                peak_date: peak,
                gcv_lambda: dy.gcv.lambda_star,
                gcv_edf: dy.gcv_fit.edf,
                trend_edf: dy.trend.edf,
                outliers: dy
                    .outliers
                    .iter()
                    .take(10)
                    .map(|o| OutlierDay {
                        date: dy.series.dates[o.index],
                        count: dy.series.counts[o.index],
                        cooks_d: o.cooks_d,
                    })
                    .collect(),
            };

            let fl = self.flow(&corpus, d)?;
            artifacts.extend(fl.artifacts.iter().cloned());
            let flow = FlowSection {
                nodes: fl.nodes,
                retweets: fl.retweets,
                observed: fl.observed,
                null: fl.null.clone(),
                pagerank_iterations: fl.pagerank.iterations,
                pagerank_top: fl
                    .pagerank
                    .ranking
                    .iter()
                    .take(self.cfg.flow.report_top)
                    .map(|a| RankedRow {
                        rank: a.rank,
                        account_id: self.masker.apply(&a.account_id),
                        account_type: kind(&a.account_id),
                        score: a.score,
                    })
                    .collect(),
                disseminator_shares: Motif::ALL
                    .into_iter()
                    .map(|m| (m, fl.profile.disseminator_shares(m)))
                    .collect(),
            };

            let classifier = match self.classifier_section(&corpus, d)? {
                Some((c, files)) => {
                    artifacts.extend(files);
                    Some(c)
                }
                None => None,
            };
            dims.push(DimensionReport {
                dimension: d,
                dynamics,
                flow,
                classifier,
            });
        }

        let audience = self.audience(&corpus)?;
        artifacts.extend(audience.artifacts.iter().cloned());
        let ground_truth = self.cross_checks(&corpus, &dims)?;
        let report = Report {
            config: self.cfg.clone(),
            summary: dataset_summary(&corpus.dataset, self.cfg.labels.source),
            dropped: corpus.dropped,
            influencers: corpus.influencers.len(),
            classified_dimensions: corpus.classified.clone(),
            dimensions: dims,
            audience,
            ground_truth,
        };
        artifacts.push(write_json(&self.out_path(REPORT_FILE), &report)?);
        artifacts.push(write_text(&self.out_path(SUMMARY_FILE), &report.summary_text())?);
        Ok((report, artifacts))
    }
}
