//! Domain types, corpus ingestion and validation, influencer screening and
//! label attachment.

mod dataset;
pub mod influencers;
pub mod io;
mod labels;
mod summary;
mod types;

pub use dataset::{Dataset, DropCounts};
pub use influencers::{fold, identify_influencers, mark_influencers, InfluencerCriteria};
pub use io::{ingest_corpus, write_corpus, CorpusPaths, Ingested, LabelRow, MACHINE_CODER};
pub use labels::{
    attach_label_rows, attach_labels, machine_label_rows, with_machine_labels,
    DEFAULT_LABEL_THRESHOLD,
};
pub use summary::{dataset_summary, DimensionSummary, SummaryStats};
pub use types::*;
