//! Generate a synthetic corpus with a planted spike, write it out and audit
//! it by re-ingesting every file.
//!
//!     cargo run --example synthetic_corpus -- [out_dir]

use civiscope::model::Dimension;
use civiscope::synth::{audit_corpus, generate, Spike, SynthSpec};

fn main() -> civiscope::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("civiscope-synth"));

    let spec = SynthSpec {
        seed: 7,
        spikes: vec![Spike {
            day: 30,
            dimension: Dimension::Imp,
            magnitude: 500,
        }],
        ..SynthSpec::default()
    };
    let corpus = generate(&spec)?;
    corpus.write(&dir)?;
    let t = &corpus.truth;
    println!("wrote {} to {}", t.counts.posts, dir.display());
    println!("  influencers {}, decoys {}, survey users {}", t.influencers.len(), t.decoys.len(), t.counts.survey_users);
    for s in &t.spikes {
        println!("  spike: {} {} extra {} posts", s.date, s.dimension, s.magnitude);
    }
    for (d, n) in &t.uncivil_totals {
        println!("  {d}: {n} uncivil posts");
    }

    let audit = audit_corpus(&dir)?;
    for c in &audit.checks {
        println!("  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name);
    }
    println!("audit {}", if audit.passed() { "passed" } else { "FAILED" });
    Ok(())
}
