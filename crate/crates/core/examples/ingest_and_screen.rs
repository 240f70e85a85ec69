//! Ingest a corpus from disk, attach labels and screen for influencers.
//!
//!     cargo run --example ingest_and_screen

use civiscope::model::{
    attach_labels, dataset_summary, ingest_corpus, mark_influencers, CorpusPaths, InfluencerCriteria, LabelSource,
    DEFAULT_LABEL_THRESHOLD,
};
use civiscope::synth::{generate, SynthSpec, LABELS_FILE};

fn main() -> civiscope::Result<()> {
    let dir = std::env::temp_dir().join("civiscope-ingest");
    let spec = SynthSpec::default();
    generate(&spec)?.write(&dir)?;

    let ingested = ingest_corpus(&CorpusPaths::in_dir(&dir), spec.window())?;
    println!("dropped {} posts outside the window", ingested.dropped.posts_outside_window);
    let labeled = attach_labels(&ingested.dataset, &dir.join(LABELS_FILE), DEFAULT_LABEL_THRESHOLD)?;

    let criteria = InfluencerCriteria::default();
    let (influencers, ds) = mark_influencers(&labeled, &criteria);
    println!("{} of {} accounts pass the screen", influencers.len(), ds.accounts().len());
    for a in ds.accounts().iter().filter(|a| !a.is_influencer).take(5) {
        println!(
            "  rejected {} ({} followers, location {:?}): {}",
            a.id, a.follower_count, a.location, a.profile_text
        );
    }

    let s = dataset_summary(&ds, LabelSource::Machine);
    for (d, row) in s.per_dimension.iter() {
        println!(
            "{d}: {} posts by {} influencers, reaching {} survey users; {} annotated",
            row.posts, row.influencers, row.followers, row.annotated
        );
    }
    Ok(())
}
