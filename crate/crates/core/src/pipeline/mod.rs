//! End-to-end orchestration: one configuration file, one subcommand per
//! stage, artifacts written to the output directory, and a consolidated
//! report.

pub mod config;
mod output;
mod report;
mod stages;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

pub use config::{
    AudienceConfig, CandidateConfig, ClassifierConfig, DynamicsConfig, FlowConfig, InputConfig, LabelConfig,
    OutputConfig, PipelineConfig, WindowConfig,
};
pub use output::{mask_handle, series_svg, Masker};
pub use report::{
    ClassifierSection, CrossCheck, DimensionReport, DynamicsSection, FlowSection, OutlierDay, RankedRow, Report,
    REPORT_FILE, SUMMARY_FILE,
};
pub use stages::{
    alignment, AudienceDimension, AudienceOutcome, ClassifyOutcome, CoderAgreement, FlowOutcome, GTestEntry,
    TrainOutcome,
};

use crate::error::{Error, Result};
use crate::model::io::read_label_rows;
use crate::model::{
    attach_label_rows, ingest_corpus, mark_influencers, Dataset, Dimension, DropCounts, LabelRow, StudyWindow,
    MACHINE_CODER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Ingest,
    Influencers,
    SelectCandidates,
    Train,
    Classify,
    Dynamics,
    Audience,
    Flow,
    Synth,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Ingest,
        Command::Influencers,
        Command::SelectCandidates,
        Command::Train,
        Command::Classify,
        Command::Dynamics,
        Command::Audience,
        Command::Flow,
        Command::Synth,
        Command::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Influencers => "influencers",
            Command::SelectCandidates => "select-candidates",
            Command::Train => "train",
            Command::Classify => "classify",
            Command::Dynamics => "dynamics",
            Command::Audience => "audience",
            Command::Flow => "flow",
            Command::Synth => "synth",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown subcommand `{s}`")))
    }
}

/// Command-line flags that take precedence over the configuration file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    /// Root seed; also reseeds the synthetic generator.
    pub seed: Option<u64>,
    pub dimension: Option<Dimension>,
    pub mask_handles: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.synth.seed = s;
        }
        if let Some(d) = self.dimension {
            cfg.dimensions = vec![d];
        }
        if self.mask_handles {
            cfg.output.mask_handles = true;
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stage seed derived from the root seed and a stage tag.
pub fn derive_seed(root: u64, tag: &str) -> u64 {
    tag.bytes().fold(splitmix64(root), |h, b| splitmix64(h ^ b as u64))
}

/// An ingested, labeled corpus with influencers marked.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub dataset: Dataset,
    pub dropped: DropCounts,
    pub influencers: BTreeSet<String>,
    /// Dimensions whose machine labels come from `labels_<dim>.csv` in the
    /// output directory rather than the input labels file.
    pub classified: Vec<Dimension>,
}

/// Files written by one subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
}

pub struct Pipeline {
    cfg: PipelineConfig,
    window: StudyWindow,
    masker: Masker,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let window = cfg.window.study_window()?;
        let masker = Masker {
            enabled: cfg.output.mask_handles,
        };
        Ok(Pipeline { cfg, window, masker })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.cfg.output.dir.join(name)
    }

    pub(crate) fn seed_for(&self, tag: &str) -> u64 {
        derive_seed(self.cfg.seed, tag)
    }

    fn classified_labels_path(&self, d: Dimension) -> PathBuf {
        self.out_path(&format!("labels_{d}.csv"))
    }

    /// Ingests the corpus, attaches labels and marks influencers. Machine
    /// labels for a dimension are taken from a previous `classify` run when
    /// one exists, replacing that dimension's machine rows from the input.
    pub fn load(&self) -> Result<Corpus> {
        let ingested = ingest_corpus(&self.cfg.input.corpus_paths(), self.window)?;
        let labels_path = self.cfg.input.labels_path();
        let mut rows: Vec<LabelRow> = if labels_path.exists() {
            read_label_rows(&labels_path)?
        } else {
            Vec::new()
        };
        let mut classified = Vec::new();
        for d in Dimension::ALL {
            let p = self.classified_labels_path(d);
            if p.exists() {
                rows.retain(|r| !(r.coder_id == MACHINE_CODER && r.dimension.parse::<Dimension>().ok() == Some(d)));
                rows.extend(read_label_rows(&p)?);
                classified.push(d);
            }
        }
        let labeled = attach_label_rows(&ingested.dataset, &rows, self.cfg.labels.threshold)?;
        let (influencers, dataset) = mark_influencers(&labeled, &self.cfg.influencers);
        Ok(Corpus {
            dataset,
            dropped: ingested.dropped,
            influencers,
            classified,
        })
    }

    pub fn run(&self, cmd: Command) -> Result<RunOutcome> {
        if cmd != Command::Synth {
            output::ensure_dir(&self.cfg.output.dir)?;
        }
        let mut artifacts = Vec::new();
        match cmd {
            Command::Synth => artifacts.extend(self.synth()?),
            Command::Report => artifacts.extend(self.report()?.1),
            Command::Train | Command::Classify | Command::SelectCandidates => {
                let corpus = self.load()?;
                for &d in &self.cfg.dimensions {
                    match cmd {
                        Command::Train => artifacts.extend(self.train(&corpus, d)?.artifacts),
                        Command::Classify => artifacts.extend(self.classify(&corpus, d)?.artifacts),
                        _ => artifacts.extend(self.select_candidates(&corpus, d)?),
                    }
                }
            }
            _ => {
                let corpus = self.load()?;
                match cmd {
                    Command::Ingest => artifacts.extend(self.ingest(&corpus)?),
                    Command::Influencers => artifacts.extend(self.influencers(&corpus)?),
                    Command::Audience => artifacts.extend(self.audience(&corpus)?.artifacts),
                    Command::Dynamics => {
                        for &d in &self.cfg.dimensions {
                            artifacts.extend(self.dynamics(&corpus, d)?.1);
                        }
                    }
                    Command::Flow => {
                        for &d in &self.cfg.dimensions {
                            artifacts.extend(self.flow(&corpus, d)?.artifacts);
                        }
                    }
                    _ => unreachable!("handled above"),
                }
            }
        }
        Ok(RunOutcome { artifacts })
    }
}

/// Loads a configuration (defaults when `path` is `None`), applies the
/// overrides and runs one subcommand.
pub fn run(cmd: Command, path: Option<&std::path::Path>, overrides: Overrides) -> Result<RunOutcome> {
    let mut cfg = match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    overrides.apply(&mut cfg);
    Pipeline::new(cfg)?.run(cmd)
}
