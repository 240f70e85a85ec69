use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::Serialize;

use super::output::{ensure_dir, series_svg, write_csv, write_json, write_text};
use super::{Corpus, Pipeline};
use crate::audience::{
    chi_square_test, crosstab, g_test, jaccard, quantile_groups, quantile_regression, representativeness,
    AudienceIndex, DensityRecord, ExposureRecord, QuantileFit, Representativeness, TableTest,
};
use crate::classifier::{cross_validate, gwet_agreement, model_file, Agreement, Classifier, EvalReport};
use crate::dynamics::{analyze_series, build_daily_series, DynamicsResult};
use crate::embedding::{load_embeddings, select_candidates, CandidateRequest, EmbeddingStore};
use crate::error::{Error, Result};
use crate::flow::{
    build_bipartite, build_retweet_graph, count_motifs, motif_identity_profile, motif_zscores, pagerank_creators,
    DimensionFilter, IdentityProfile, MotifCounts, NullConfig, NullModelResult, PageRankResult,
};
use crate::model::{dataset_summary, AccountType, Dimension, DropCounts, Identity, LabelRow, SummaryStats, MACHINE_CODER};
use crate::synth::{audit_corpus, generate, AuditReport};

#[derive(Serialize)]
struct IngestSummary<'a> {
    summary: SummaryStats,
    dropped: DropCounts,
    influencers: usize,
    classified_dimensions: &'a [Dimension],
}

#[derive(Serialize)]
struct InfluencerRow {
    account_id: String,
    handle: String,
    account_type: AccountType,
    follower_count: u64,
}

/// Pairwise agreement between the first two human coders of a dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoderAgreement {
    pub coders: [String; 2],
    pub items: usize,
    pub ac1: Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainOutcome {
    pub dimension: Dimension,
    pub n_train: usize,
    pub positives: usize,
    pub eval: EvalReport,
    pub agreement: Option<CoderAgreement>,
    #[serde(skip)]
    pub model: Classifier,
    #[serde(skip)]
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOutcome {
    pub dimension: Dimension,
    pub labeled: usize,
    pub positives: usize,
    /// Posts left unlabeled because they have no embedding.
    pub missing_embeddings: usize,
    #[serde(skip)]
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GTestEntry {
    pub dimension: Dimension,
    /// `account_type` or `alignment`.
    pub rows_by: &'static str,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<u64>>,
    pub g: Option<TableTest>,
    pub chi_square: Option<TableTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AudienceDimension {
    pub dimension: Dimension,
    pub influencers: usize,
    /// Influencers without posts in the window.
    pub excluded: usize,
    pub qreg: Vec<QuantileFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AudienceOutcome {
    pub dimensions: Vec<AudienceDimension>,
    pub gtests: Vec<GTestEntry>,
    pub representativeness: Representativeness,
    #[serde(skip)]
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOutcome {
    pub dimension: Dimension,
    pub nodes: usize,
    pub retweets: u64,
    pub observed: MotifCounts,
    pub null: NullModelResult,
    pub pagerank: PageRankResult,
    pub profile: IdentityProfile,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Serialize)]
struct MotifsFile<'a> {
    dimension: Dimension,
    nodes: usize,
    retweets: u64,
    direct: &'a crate::flow::MotifZ,
    two_step: &'a crate::flow::MotifZ,
    mixed: &'a crate::flow::MotifZ,
    null_model: &'a NullConfig,
}

#[derive(Serialize)]
struct PageRankRow {
    rank: usize,
    account_id: String,
    account_type: AccountType,
    score: f64,
}

#[derive(Serialize)]
struct DynamicsRow {
    date: chrono::NaiveDate,
    count: u64,
    fitted_trend: f64,
    fitted_gcv: f64,
    cooks_d: f64,
    outlier_flag: bool,
}

#[derive(Serialize)]
struct DensityRow {
    influencer_id: String,
    uncivil_count: usize,
    total_count: usize,
    density: f64,
    quantile: usize,
}

#[derive(Serialize)]
struct ExposureRow {
    influencer_id: String,
    exposure: u64,
    direct: u64,
    indirect: u64,
    quantile: usize,
}

#[derive(Serialize)]
struct JaccardRow {
    sets: &'static str,
    a: String,
    b: String,
    jaccard: f64,
}

#[derive(Serialize)]
struct QregFile<'a> {
    dimension: Dimension,
    x: &'static str,
    y: &'static str,
    n: usize,
    bootstrap: usize,
    fits: &'a [QuantileFit],
}

/// Political alignment of an account from its identity annotations.
pub fn alignment(ids: &BTreeSet<Identity>) -> &'static str {
    let left = ids.contains(&Identity::Left) || ids.contains(&Identity::LulaCamp);
    let right = ids.contains(&Identity::Right) || ids.contains(&Identity::BolsonaroCamp);
    match (left, right) {
        (true, false) => "left",
        (false, true) => "right",
        (true, true) => "mixed",
        (false, false) => "other",
    }
}

/// Training pairs for a dimension: every post with a unanimous human label
/// and an embedding.
pub(crate) fn training_set(corpus: &Corpus, store: &EmbeddingStore, d: Dimension) -> (Vec<Vec<f64>>, Vec<bool>) {
    let ds = &corpus.dataset;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, p) in ds.posts().iter().enumerate() {
        if let (Some(v), Some(e)) = (ds.human_label(i, d), store.get(&p.id)) {
            x.push(e.to_vec());
            y.push(v);
        }
    }
    (x, y)
}

fn coder_agreement(corpus: &Corpus, d: Dimension) -> Option<CoderAgreement> {
    let mut by_coder: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for a in corpus.dataset.annotations().iter().filter(|a| a.dimension == d) {
        by_coder.entry(&a.coder_id).or_default().insert(&a.post_id, a.value);
    }
    let mut coders = by_coder.keys();
    let (ca, cb) = (*coders.next()?, *coders.next()?);
    let pairs: Vec<(usize, usize)> = by_coder[ca]
        .iter()
        .filter_map(|(post, &va)| by_coder[cb].get(post).map(|&vb| (va as usize, vb as usize)))
        .collect();
    let ac1 = gwet_agreement(&pairs, 2, None).ok()?;
    Some(CoderAgreement {
        coders: [ca.to_string(), cb.to_string()],
        items: pairs.len(),
        ac1,
    })
}

fn table_tests(
    dimension: Dimension,
    rows_by: &'static str,
    pairs: Vec<(String, String)>,
    cols: &[String],
) -> GTestEntry {
    let table = crosstab(pairs, None, Some(cols));
    let (g, chi, note) = match (g_test(&table), chi_square_test(&table)) {
        (Ok(g), Ok(c)) => (Some(g), Some(c), None),
        (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
    };
    GTestEntry {
        dimension,
        rows_by,
        rows: table.rows,
        cols: table.cols,
        cells: table.cells,
        g,
        chi_square: chi,
        note,
    }
}

impl Pipeline {
    pub(crate) fn embeddings(&self) -> Result<EmbeddingStore> {
        let p = self.cfg.input.embeddings_path();
        if !p.exists() {
            return Err(Error::MissingDependency(format!(
                "embeddings file {} not found; produce it with the embedding adapter",
                p.display()
            )));
        }
        load_embeddings(&p, None)
    }

    pub(crate) fn ingest(&self, corpus: &Corpus) -> Result<Vec<PathBuf>> {
        let s = IngestSummary {
            summary: dataset_summary(&corpus.dataset, self.cfg.labels.source),
            dropped: corpus.dropped,
            influencers: corpus.influencers.len(),
            classified_dimensions: &corpus.classified,
        };
        Ok(vec![write_json(&self.out_path("summary.json"), &s)?])
    }

    pub(crate) fn influencers(&self, corpus: &Corpus) -> Result<Vec<PathBuf>> {
        let rows = corpus.dataset.influencers().map(|a| InfluencerRow {
            account_id: self.masker.apply(&a.id),
            handle: self.masker.apply(&a.handle),
            account_type: a.account_type,
            follower_count: a.follower_count,
        });
        Ok(vec![write_csv(&self.out_path("influencers.csv"), rows)?])
    }

    /// Posts with a unanimous positive human label seed the centroid; every
    /// annotated post is excluded from the ranking.
    pub(crate) fn select_candidates(&self, corpus: &Corpus, d: Dimension) -> Result<Vec<PathBuf>> {
        let store = self.embeddings()?;
        let ds = &corpus.dataset;
        let positive_ids: Vec<String> = ds
            .posts()
            .iter()
            .enumerate()
            .filter(|&(i, p)| ds.human_label(i, d) == Some(true) && store.contains(&p.id))
            .map(|(_, p)| p.id.clone())
            .collect();
        if positive_ids.is_empty() {
            return Err(Error::invalid(format!(
                "no human-labeled positive posts with embeddings for {d}"
            )));
        }
        let excluded_ids: Vec<String> = ds
            .annotations()
            .iter()
            .filter(|a| a.dimension == d)
            .map(|a| a.post_id.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let c = &self.cfg.candidates;
        let req = CandidateRequest {
            positive_ids,
            excluded_ids,
            high_k: c.high_k,
            low_k: c.low_k,
            low_floor: c.low_floor,
            seed: self.seed_for(&format!("candidates:{d}:{}", c.round)),
            round: c.round,
        };
        let batch = select_candidates(&store, &req)?;
        let dir = self.out_path(&format!("candidates_{d}"));
        ensure_dir(&dir)?;
        let path = dir.join(batch.file_name());
        batch.write_csv(&path)?;
        Ok(vec![path])
    }

    pub(crate) fn train_with(&self, corpus: &Corpus, store: &EmbeddingStore, d: Dimension) -> Result<TrainOutcome> {
        let (x, y) = training_set(corpus, store, d);
        let positives = y.iter().filter(|&&v| v).count();
        if positives == 0 || positives == y.len() {
            return Err(Error::invalid(format!(
                "{d}: training needs both classes among {} labeled posts with embeddings",
                y.len()
            )));
        }
        let spec = self.cfg.classifier.model;
        let model = Classifier::train(&spec, &x, &y, self.seed_for(&format!("train:{d}")))?;
        let eval = cross_validate(
            &x,
            &y,
            self.cfg.classifier.folds,
            &spec,
            self.seed_for(&format!("cv:{d}")),
            self.cfg.labels.threshold,
        )?;
        let mut outcome = TrainOutcome {
            dimension: d,
            n_train: y.len(),
            positives,
            eval,
            agreement: coder_agreement(corpus, d),
            model,
            artifacts: Vec::new(),
        };
        let model_path = self.out_path(&format!("model_{d}.txt"));
        model_file::save(&outcome.model, &model_path)?;
        let eval_path = write_json(&self.out_path(&format!("eval_{d}.json")), &outcome)?;
        outcome.artifacts = vec![model_path, eval_path];
        Ok(outcome)
    }

    pub(crate) fn train(&self, corpus: &Corpus, d: Dimension) -> Result<TrainOutcome> {
        let store = self.embeddings()?;
        self.train_with(corpus, &store, d)
    }

    /// Labels every post that has an embedding with the saved model and
    /// writes machine label rows for later runs to pick up.
    pub(crate) fn classify(&self, corpus: &Corpus, d: Dimension) -> Result<ClassifyOutcome> {
        let model_path = self.out_path(&format!("model_{d}.txt"));
        if !model_path.exists() {
            return Err(Error::MissingDependency(format!(
                "{} not found; run `train` for {d} first",
                model_path.display()
            )));
        }
        let model = model_file::load(&model_path)?;
        let store = self.embeddings()?;
        if store.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: store.dim(),
                id: store.model().to_string(),
            });
        }
        let threshold = self.cfg.labels.threshold;
        let mut rows = Vec::new();
        let mut missing = 0;
        let mut positives = 0;
        for p in corpus.dataset.posts() {
            let Some(v) = store.get(&p.id) else {
                missing += 1;
                continue;
            };
            let prob = model.predict_proba(v);
            let value = prob >= threshold;
            positives += value as usize;
            rows.push(LabelRow {
                post_id: p.id.clone(),
                dimension: d.to_string(),
                coder_id: MACHINE_CODER.to_string(),
                value: if value { "1" } else { "0" }.to_string(),
                prob: Some(format!("{prob}")),
            });
        }
        let path = write_csv(&self.classified_labels_path(d), &rows)?;
        Ok(ClassifyOutcome {
            dimension: d,
            labeled: rows.len(),
            positives,
            missing_embeddings: missing,
            artifacts: vec![path],
        })
    }

    pub(crate) fn dynamics(&self, corpus: &Corpus, d: Dimension) -> Result<(DynamicsResult, Vec<PathBuf>)> {
        let dc = &self.cfg.dynamics;
        let series = build_daily_series(&corpus.dataset, d, self.cfg.labels.source)?;
        let res = analyze_series(series, dc.trend_lambda, &dc.grid(), dc.outliers)?;
        let flagged: BTreeSet<usize> = res.outliers.iter().map(|o| o.index).collect();
        let rows = (0..res.series.len()).map(|i| DynamicsRow {
            date: res.series.dates[i],
            count: res.series.counts[i],
            fitted_trend: res.trend.fitted[i],
            fitted_gcv: res.gcv_fit.fitted[i],
            cooks_d: res.cooks.values[i],
            outlier_flag: flagged.contains(&i),
        });
        let mut artifacts = vec![write_csv(&self.out_path(&format!("dynamics_{d}.csv")), rows)?];
        if self.cfg.output.svg {
            let trend_label = format!("trend (lambda {})", dc.trend_lambda);
            let gcv_label = format!("GCV (lambda {:.3e})", res.gcv.lambda_star);
            let svg = series_svg(
                &format!("{d}: uncivil posts per day"),
                &res.series.dates,
                &res.series.counts,
                &[
                    (&trend_label, "steelblue", &res.trend.fitted),
                    (&gcv_label, "darkorange", &res.gcv_fit.fitted),
                ],
                &flagged.iter().copied().collect::<Vec<_>>(),
            );
            artifacts.push(write_text(&self.out_path(&format!("dynamics_{d}.svg")), &svg)?);
        }
        Ok((res, artifacts))
    }

    pub(crate) fn audience(&self, corpus: &Corpus) -> Result<AudienceOutcome> {
        let ac = &self.cfg.audience;
        let source = self.cfg.labels.source;
        let ds = &corpus.dataset;
        let index = AudienceIndex::new(ds);
        let quantile_labels: Vec<String> = (1..=ac.groups).map(|q| format!("Q{q}")).collect();
        let mut artifacts = Vec::new();
        let mut dims = Vec::new();
        let mut gtests = Vec::new();
        let mut disseminators: Vec<(String, BTreeSet<String>)> = Vec::new();
        let mut audiences: Vec<(String, BTreeSet<String>)> = Vec::new();

        for &d in &self.cfg.dimensions {
            let (dens, excluded): (Vec<DensityRecord>, Vec<String>) = index.densities(d, source);
            let keyed: Vec<(&str, f64)> = dens.iter().map(|r| (r.influencer_id.as_str(), r.density)).collect();
            let dq = quantile_groups(&keyed, ac.groups)?;
            let exps: Vec<ExposureRecord> = dens
                .iter()
                .map(|r| index.exposure_count(&r.influencer_id, d, source, ac.exposure_mode))
                .collect();
            let keyed: Vec<(&str, f64)> = exps.iter().map(|r| (r.influencer_id.as_str(), r.exposure as f64)).collect();
            let eq = quantile_groups(&keyed, ac.groups)?;

            let rows = dens.iter().zip(&dq).map(|(r, &q)| DensityRow {
                influencer_id: self.masker.apply(&r.influencer_id),
                uncivil_count: r.uncivil_count,
                total_count: r.total_count,
                density: r.density,
                quantile: q,
            });
            artifacts.push(write_csv(&self.out_path(&format!("density_{d}.csv")), rows)?);
            let rows = exps.iter().zip(&eq).map(|(r, &q)| ExposureRow {
                influencer_id: self.masker.apply(&r.influencer_id),
                exposure: r.exposure,
                direct: r.direct,
                indirect: r.indirect,
                quantile: q,
            });
            artifacts.push(write_csv(&self.out_path(&format!("exposure_{d}.csv")), rows)?);

            let x: Vec<f64> = dens.iter().map(|r| r.density).collect();
            let y: Vec<f64> = exps.iter().map(|r| r.exposure as f64).collect();
            let fits = quantile_regression(&x, &y, &ac.taus, ac.bootstrap, self.seed_for(&format!("qreg:{d}")))?;
            artifacts.push(write_json(
                &self.out_path(&format!("qreg_{d}.json")),
                &QregFile {
                    dimension: d,
                    x: "incivility_density",
                    y: "exposure",
                    n: x.len(),
                    bootstrap: ac.bootstrap,
                    fits: &fits,
                },
            )?);

            for q in 1..=ac.groups {
                let label = format!("{d}:Q{q}");
                let members: BTreeSet<String> = dens
                    .iter()
                    .zip(&dq)
                    .filter(|&(_, &g)| g == q)
                    .map(|(r, _)| r.influencer_id.clone())
                    .collect();
                let reached: BTreeSet<String> = exps
                    .iter()
                    .zip(&dq)
                    .filter(|&(_, &g)| g == q)
                    .flat_map(|(r, _)| r.exposed_users.iter().cloned())
                    .collect();
                disseminators.push((label.clone(), members));
                audiences.push((label, reached));
            }

            let account = |id: &str| ds.account(id).expect("influencers are accounts");
            let type_pairs = dens
                .iter()
                .zip(&dq)
                .map(|(r, &q)| (account(&r.influencer_id).account_type.to_string(), format!("Q{q}")))
                .collect();
            gtests.push(table_tests(d, "account_type", type_pairs, &quantile_labels));
            let align_pairs = dens
                .iter()
                .zip(&dq)
                .filter(|(r, _)| account(&r.influencer_id).account_type == AccountType::Individual)
                .map(|(r, &q)| (alignment(&account(&r.influencer_id).identities).to_string(), format!("Q{q}")))
                .collect();
            gtests.push(table_tests(d, "alignment", align_pairs, &quantile_labels));

            dims.push(AudienceDimension {
                dimension: d,
                influencers: dens.len(),
                excluded: excluded.len(),
                qreg: fits,
            });
        }

        let mut jrows = Vec::new();
        for (name, sets) in [("disseminators", &disseminators), ("audiences", &audiences)] {
            for (a, sa) in sets {
                for (b, sb) in sets {
                    jrows.push(JaccardRow {
                        sets: name,
                        a: a.clone(),
                        b: b.clone(),
                        jaccard: jaccard(sa, sb),
                    });
                }
            }
        }
        artifacts.push(write_csv(&self.out_path("jaccard_matrix.csv"), jrows)?);
        artifacts.push(write_json(&self.out_path("gtests.json"), &gtests)?);
        let rep = representativeness(ds);
        artifacts.push(write_json(&self.out_path("representativeness.json"), &rep)?);
        Ok(AudienceOutcome {
            dimensions: dims,
            gtests,
            representativeness: rep,
            artifacts,
        })
    }

    pub(crate) fn flow(&self, corpus: &Corpus, d: Dimension) -> Result<FlowOutcome> {
        let ds = &corpus.dataset;
        let fc = &self.cfg.flow;
        let g = build_bipartite(ds);
        let r = build_retweet_graph(
            ds,
            Some(DimensionFilter {
                dimension: d,
                source: self.cfg.labels.source,
            }),
        );
        let census = count_motifs(&g, &r);
        let null_cfg = NullConfig {
            replicates: fc.replicates,
            swap_factor: fc.swap_factor,
            scope: fc.scope,
            seed: self.seed_for(&format!("null:{d}")),
        };
        let null = motif_zscores(&g, &r, &null_cfg)?;
        let pagerank = pagerank_creators(&r, &fc.pagerank)?;
        let profile = motif_identity_profile(&census, ds);

        let mut artifacts = vec![write_json(
            &self.out_path(&format!("motifs_{d}.json")),
            &MotifsFile {
                dimension: d,
                nodes: r.nodes.len(),
                retweets: r.total_weight(),
                direct: &null.direct,
                two_step: &null.two_step,
                mixed: &null.mixed,
                null_model: &null.config,
            },
        )?];
        let kind = |id: &str| ds.account(id).map_or(AccountType::Unknown, |a| a.account_type);
        let rows = pagerank.ranking.iter().map(|a| PageRankRow {
            rank: a.rank,
            account_id: self.masker.apply(&a.account_id),
            account_type: kind(&a.account_id),
            score: a.score,
        });
        artifacts.push(write_csv(&self.out_path(&format!("pagerank_{d}.csv")), rows)?);
        artifacts.push(write_csv(
            &self.out_path(&format!("motif_identity_{d}.csv")),
            profile.rows(),
        )?);
        Ok(FlowOutcome {
            dimension: d,
            nodes: r.nodes.len(),
            retweets: r.total_weight(),
            observed: census.counts,
            null,
            pagerank,
            profile,
            artifacts,
        })
    }

    /// Generates a corpus into the input directory and audits it.
    pub(crate) fn synth(&self) -> Result<Vec<PathBuf>> {
        let corpus = generate(&self.cfg.synth)?;
        let dir = &self.cfg.input.dir;
        corpus.write(dir)?;
        let audit: AuditReport = audit_corpus(dir)?;
        if !audit.passed() {
            let failed: Vec<&str> = audit
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            return Err(Error::invalid(format!("generated corpus failed its audit: {}", failed.join(", "))));
        }
        let names = [
            "accounts.jsonl",
            "posts.jsonl",
            "follows.csv",
            "survey.jsonl",
            crate::synth::LABELS_FILE,
            crate::synth::EMBEDDINGS_FILE,
            crate::synth::GROUND_TRUTH_FILE,
        ];
        Ok(names.iter().map(|n| dir.join(n)).collect())
    }
}
