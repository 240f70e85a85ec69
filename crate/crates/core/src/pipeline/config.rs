use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::audience::{ExposureMode, DEFAULT_TAUS};
use crate::classifier::{ClassifierSpec, TrainConfig};
use crate::dynamics::{log_grid, OutlierRule, DEFAULT_TREND_LAMBDA};
use crate::error::{Error, Result};
use crate::flow::{NullScope, PageRankConfig, DEFAULT_REPLICATES, DEFAULT_SWAP_FACTOR};
use crate::model::{CorpusPaths, Dimension, InfluencerCriteria, LabelSource, StudyWindow, DEFAULT_LABEL_THRESHOLD};
use crate::synth::{SynthSpec, EMBEDDINGS_FILE, LABELS_FILE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub dir: PathBuf,
    pub accounts: Option<PathBuf>,
    pub posts: Option<PathBuf>,
    pub follows: Option<PathBuf>,
    pub survey: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            dir: PathBuf::from("data"),
            accounts: None,
            posts: None,
            follows: None,
            survey: None,
            labels: None,
            embeddings: None,
        }
    }
}

impl InputConfig {
    fn resolve(&self, explicit: &Option<PathBuf>, name: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.dir.join(name))
    }

    pub fn corpus_paths(&self) -> CorpusPaths {
        let defaults = CorpusPaths::in_dir(&self.dir);
        CorpusPaths {
            accounts: self.accounts.clone().unwrap_or(defaults.accounts),
            posts: self.posts.clone().unwrap_or(defaults.posts),
            follows: self.follows.clone().unwrap_or(defaults.follows),
            survey: Some(self.survey.clone().unwrap_or(defaults.survey.unwrap())),
        }
    }

    pub fn labels_path(&self) -> PathBuf {
        self.resolve(&self.labels, LABELS_FILE)
    }

    pub fn embeddings_path(&self) -> PathBuf {
        self.resolve(&self.embeddings, EMBEDDINGS_FILE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Replace account handles by their first two characters and `**`.
    pub mask_handles: bool,
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            mask_handles: false,
            svg: true,
        }
    }
}

/// Half-open window `[start, end)` in whole UTC days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            start: NaiveDate::from_ymd_opt(2022, 8, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2022, 11, 1).unwrap(),
        }
    }
}

impl WindowConfig {
    pub fn study_window(&self) -> Result<StudyWindow> {
        let at = |d: NaiveDate| Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).unwrap());
        StudyWindow::new(at(self.start), at(self.end)).map_err(|_| Error::Config {
            field: "window.end".into(),
            reason: format!("{} is not after window.start {}", self.end, self.start),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelConfig {
    pub threshold: f64,
    pub source: LabelSource,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            threshold: DEFAULT_LABEL_THRESHOLD,
            source: LabelSource::Machine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateConfig {
    pub high_k: usize,
    pub low_k: usize,
    pub low_floor: Option<f64>,
    pub round: u32,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig {
            high_k: 50,
            low_k: 50,
            low_floor: None,
            round: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub model: ClassifierSpec,
    pub folds: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            model: ClassifierSpec::default(),
            folds: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub trend_lambda: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub outliers: OutlierRule,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            trend_lambda: DEFAULT_TREND_LAMBDA,
            grid_min: 1e-6,
            grid_max: 1e3,
            grid_points: 40,
            outliers: OutlierRule::default(),
        }
    }
}

impl DynamicsConfig {
    pub fn grid(&self) -> Vec<f64> {
        log_grid(self.grid_min, self.grid_max, self.grid_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AudienceConfig {
    pub taus: Vec<f64>,
    pub bootstrap: usize,
    pub groups: usize,
    pub exposure_mode: ExposureMode,
}

impl Default for AudienceConfig {
    fn default() -> Self {
        AudienceConfig {
            taus: DEFAULT_TAUS.to_vec(),
            bootstrap: 1000,
            groups: 4,
            exposure_mode: ExposureMode::PerPost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub replicates: usize,
    pub swap_factor: u32,
    pub scope: NullScope,
    pub pagerank: PageRankConfig,
    /// Rows of the PageRank ranking carried into the report.
    pub report_top: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            replicates: DEFAULT_REPLICATES,
            swap_factor: DEFAULT_SWAP_FACTOR,
            scope: NullScope::AllEdges,
            pagerank: PageRankConfig::default(),
            report_top: 10,
        }
    }
}

/// Everything a pipeline run depends on besides the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub dimensions: Vec<Dimension>,
    pub input: InputConfig,
    pub output: OutputConfig,
    pub window: WindowConfig,
    pub labels: LabelConfig,
    pub influencers: InfluencerCriteria,
    pub candidates: CandidateConfig,
    pub classifier: ClassifierConfig,
    pub dynamics: DynamicsConfig,
    pub audience: AudienceConfig,
    pub flow: FlowConfig,
    pub synth: SynthSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            dimensions: Dimension::ALL.to_vec(),
            input: InputConfig::default(),
            output: OutputConfig::default(),
            window: WindowConfig::default(),
            labels: LabelConfig::default(),
            influencers: InfluencerCriteria::default(),
            candidates: CandidateConfig::default(),
            classifier: ClassifierConfig::default(),
            dynamics: DynamicsConfig::default(),
            audience: AudienceConfig::default(),
            flow: FlowConfig::default(),
            synth: SynthSpec::default(),
        }
    }
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must be a positive number, got {v}")))
    }
}

fn open_unit(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must lie strictly between 0 and 1, got {v}")))
    }
}

fn check_train(prefix: &str, t: &TrainConfig) -> Result<()> {
    if !(t.l2.is_finite() && t.l2 >= 0.0) {
        return Err(bad(&format!("{prefix}.l2"), format!("must be non-negative, got {}", t.l2)));
    }
    if let Some(lr) = t.lr {
        positive(&format!("{prefix}.lr"), lr)?;
    }
    if t.max_iter == 0 {
        return Err(bad(&format!("{prefix}.max_iter"), "must be at least 1"));
    }
    positive(&format!("{prefix}.tol"), t.tol)
}

impl PipelineConfig {
    /// Parses a TOML document; unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let reason = e.message().to_string();
            let field = e
                .span()
                .map(|s| text[s].lines().next().unwrap_or("").trim().to_string())
                .filter(|s| !s.is_empty())
                .unwrap_or_else(|| "<document>".into());
            Error::Config { field, reason }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() {
            return Err(bad("dimensions", "must name at least one dimension"));
        }
        if self.dimensions.iter().collect::<BTreeSet<_>>().len() != self.dimensions.len() {
            return Err(bad("dimensions", "contains duplicates"));
        }
        self.window.study_window()?;
        open_unit("labels.threshold", self.labels.threshold)?;

        let c = &self.candidates;
        if c.high_k + c.low_k == 0 {
            return Err(bad("candidates.high_k", "high_k and low_k cannot both be zero"));
        }
        if let Some(f) = c.low_floor {
            if !(-1.0..=1.0).contains(&f) {
                return Err(bad("candidates.low_floor", format!("must lie in [-1, 1], got {f}")));
            }
        }

        if self.classifier.folds < 2 {
            return Err(bad("classifier.folds", format!("must be at least 2, got {}", self.classifier.folds)));
        }
        match &self.classifier.model {
            ClassifierSpec::Logistic(t) => check_train("classifier.model", t)?,
            ClassifierSpec::Ensemble(e) => {
                if e.members == 0 {
                    return Err(bad("classifier.model.members", "must be at least 1"));
                }
                check_train("classifier.model.train", &e.train)?;
            }
        }

        let d = &self.dynamics;
        positive("dynamics.trend_lambda", d.trend_lambda)?;
        positive("dynamics.grid_min", d.grid_min)?;
        positive("dynamics.grid_max", d.grid_max)?;
        if d.grid_max < d.grid_min {
            return Err(bad("dynamics.grid_max", "must not be below grid_min"));
        }
        if d.grid_points < 2 {
            return Err(bad("dynamics.grid_points", "must be at least 2"));
        }
        match d.outliers {
            OutlierRule::Threshold(Some(c)) if c.is_nan() || c < 0.0 => {
                return Err(bad("dynamics.outliers.value", format!("threshold must be non-negative, got {c}")))
            }
            OutlierRule::TopK(0) => return Err(bad("dynamics.outliers.value", "top_k must be at least 1")),
            _ => {}
        }

        let a = &self.audience;
        if a.taus.is_empty() {
            return Err(bad("audience.taus", "must list at least one quantile"));
        }
        for t in &a.taus {
            open_unit("audience.taus", *t)?;
        }
        if a.groups < 2 {
            return Err(bad("audience.groups", "must be at least 2"));
        }

        let f = &self.flow;
        if f.replicates < 30 {
            return Err(bad("flow.replicates", format!("must be at least 30, got {}", f.replicates)));
        }
        if f.swap_factor < 1 {
            return Err(bad("flow.swap_factor", "must be at least 1"));
        }
        open_unit("flow.pagerank.damping", f.pagerank.damping)?;
        positive("flow.pagerank.tol", f.pagerank.tol)?;
        if f.pagerank.max_iter == 0 {
            return Err(bad("flow.pagerank.max_iter", "must be at least 1"));
        }
        self.synth.validate()
    }
}
