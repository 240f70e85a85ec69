//! Follower, co-followership and retweet layers; the three exposure motifs;
//! a degree-preserving null model; and PageRank ranking of content creators.

mod graphs;
mod motifs;
mod null;
mod pagerank;
mod profile;

pub use graphs::{
    build_bipartite, build_retweet_graph, project_shared_followers, BipartiteFollowerGraph,
    DimensionFilter, RetweetEdge, RetweetGraph, SharedFollowerProjection,
};
pub use motifs::{count_motifs, Motif, MotifCensus, MotifCounter, MotifCounts};
pub use null::{
    motif_zscores, null_replicates, randomize_retweets, swap_instances, MotifZ, NullConfig,
    NullModelResult, NullScope, DEFAULT_REPLICATES, DEFAULT_SWAP_FACTOR,
};
pub use pagerank::{
    pagerank, pagerank_creators, PageRankConfig, PageRankResult, RankedAccount, DEFAULT_DAMPING,
    DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
pub use profile::{motif_identity_profile, IdentityProfile, ProfileRow};
