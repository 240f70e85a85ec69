//! Exposure motifs over follower and retweet layers, compared against a
//! degree-preserving swap null model.
//!
//!     cargo run --release --example flow_motifs

use civiscope::flow::{
    build_bipartite, build_retweet_graph, count_motifs, motif_identity_profile, motif_zscores,
    project_shared_followers, DimensionFilter, Motif, NullConfig,
};
use civiscope::model::{Dimension, LabelSource};
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let ds = &corpus.dataset;

    let g = build_bipartite(ds);
    let shared = project_shared_followers(&g);
    println!(
        "{} influencers, {} survey users, {} follow edges, {} co-followed pairs",
        g.influencers.len(),
        g.survey_users.len(),
        g.edge_count(),
        shared.edges.len()
    );

    let filter = DimensionFilter {
        dimension: Dimension::Imp,
        source: LabelSource::Machine,
    };
    let r = build_retweet_graph(ds, Some(filter));
    let census = count_motifs(&g, &r);
    let null = motif_zscores(&g, &r, &NullConfig { seed: 5, ..NullConfig::default() })?;
    for m in Motif::ALL {
        let z = null.get(m);
        println!(
            "  {:<8} observed {:>6}  null {:>9.1} +/- {:>6.1}  z = {}",
            m.as_str(),
            z.observed,
            z.mean,
            z.std,
            z.z.map_or("n/a".into(), |v| format!("{v:.2}"))
        );
    }

    let profile = motif_identity_profile(&census, ds);
    for m in Motif::ALL {
        let shares: Vec<String> = profile
            .disseminator_shares(m)
            .iter()
            .map(|(t, s)| format!("{t} {:.0}%", 100.0 * s))
            .collect();
        println!("  {} disseminators: {}", m.as_str(), shares.join(", "));
    }
    Ok(())
}
