//! The whole pipeline through the orchestrator: generate a corpus, run every
//! stage and print the consolidated summary.
//!
//!     cargo run --release --example full_pipeline

use civiscope::pipeline::{Command, Pipeline, PipelineConfig};

fn main() -> civiscope::Result<()> {
    let root = std::env::temp_dir().join("civiscope-pipeline");
    let mut cfg = PipelineConfig::default();
    cfg.input.dir = root.join("data");
    cfg.output.dir = root.join("out");
    cfg.output.mask_handles = true;
    cfg.audience.bootstrap = 200;

    let pipeline = Pipeline::new(cfg)?;
    pipeline.run(Command::Synth)?;
    let (report, artifacts) = pipeline.report()?;
    print!("{}", report.summary_text());
    println!("\n{} artifacts in {}", artifacts.len(), pipeline.config().output.dir.display());
    if !report.cross_checks_passed() {
        eprintln!("some ground-truth cross-checks failed");
        std::process::exit(1);
    }
    Ok(())
}
