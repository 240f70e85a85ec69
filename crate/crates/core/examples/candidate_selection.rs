//! One annotation round: rank unlabeled posts by cosine similarity to the
//! centroid of known positives and draw the high and low bands.
//!
//!     cargo run --example candidate_selection

use civiscope::embedding::{select_candidates, CandidateRequest};
use civiscope::model::Dimension;
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let ds = &corpus.dataset;
    let d = Dimension::Hsst;

    let positive_ids: Vec<String> = ds
        .posts()
        .iter()
        .enumerate()
        .filter(|&(i, _)| ds.human_label(i, d) == Some(true))
        .map(|(_, p)| p.id.clone())
        .collect();
    let excluded_ids: Vec<String> = ds
        .annotations()
        .iter()
        .filter(|a| a.dimension == d)
        .map(|a| a.post_id.clone())
        .collect();

    let batch = select_candidates(
        &corpus.embeddings,
        &CandidateRequest {
            positive_ids,
            excluded_ids,
            high_k: 20,
            low_k: 20,
            low_floor: None,
            seed: 1,
            round: 1,
        },
    )?;

    let is_planted = |id: &str| {
        let i = ds.post_position(id).unwrap();
        ds.posts()[i].machine[d].is_some_and(|l| l.value)
    };
    let hits = |band: &[(String, f64)]| band.iter().filter(|(id, _)| is_planted(id)).count();
    println!("low band floor: cosine {:.3}", batch.low_floor);
    println!("high band: {}/{} planted {d} posts", hits(&batch.high_band), batch.high_band.len());
    println!("low band:  {}/{} planted {d} posts", hits(&batch.low_band), batch.low_band.len());
    for (id, s) in batch.high_band.iter().take(5) {
        println!("  {id} {s:.3}");
    }
    let path = std::env::temp_dir().join(batch.file_name());
    batch.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
