//! Rank content creators with weighted PageRank over the retweet graph,
//! where each retweet passes credit to the original author.
//!
//!     cargo run --example creator_ranking

use civiscope::flow::{build_retweet_graph, pagerank_creators, DimensionFilter, PageRankConfig};
use civiscope::model::{AccountType, Dimension, LabelSource};
use civiscope::pipeline::mask_handle;
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let ds = &corpus.dataset;

    for d in [Dimension::Imp, Dimension::Threat] {
        let r = build_retweet_graph(
            ds,
            Some(DimensionFilter {
                dimension: d,
                source: LabelSource::Machine,
            }),
        );
        let pr = pagerank_creators(&r, &PageRankConfig::default())?;
        println!("{d}: {} accounts, converged in {} iterations", r.nodes.len(), pr.iterations);
        for a in pr.ranking.iter().take(5) {
            let acct = ds.account(&a.account_id);
            let kind = acct.map_or(AccountType::Unknown, |x| x.account_type);
            let handle = acct.map_or("?".to_string(), |x| mask_handle(&x.handle));
            println!("  #{} {:<6} {:<11} {:.4}", a.rank, handle, kind.as_str(), a.score);
        }
    }
    Ok(())
}
