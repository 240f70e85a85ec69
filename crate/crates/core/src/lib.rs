//! Measurement and analysis of multidimensional political incivility in
//! social-media corpora: when it spikes, who disseminates it, who is exposed,
//! and which information-flow motifs carry it.

pub mod error;
pub mod audience;
pub mod classifier;
pub mod dynamics;
pub mod embedding;
pub mod flow;
pub mod model;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
