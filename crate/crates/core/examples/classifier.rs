//! Train a bagged logistic classifier on human-labeled embeddings, evaluate
//! it with stratified ten-fold cross-validation and measure coder agreement.
//!
//!     cargo run --example classifier

use std::collections::BTreeMap;

use civiscope::classifier::{assign_labels, cross_validate, gwet_agreement, model_file, Classifier, ClassifierSpec};
use civiscope::model::Dimension;
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let ds = &corpus.dataset;
    let d = Dimension::Imp;

    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, p) in ds.posts().iter().enumerate() {
        if let (Some(v), Some(e)) = (ds.human_label(i, d), corpus.embeddings.get(&p.id)) {
            x.push(e.to_vec());
            y.push(v);
        }
    }
    println!("{} training posts, {} positive", y.len(), y.iter().filter(|&&v| v).count());

    let spec = ClassifierSpec::default();
    let report = cross_validate(&x, &y, 10, &spec, 3, 0.7)?;
    let m = &report.metrics;
    println!(
        "10-fold pooled: precision {:.3} recall {:.3} F1 {:.3} (weighted F1 {:.3})",
        m.positive.precision, m.positive.recall, m.positive.f1, m.weighted_f1
    );

    let model = Classifier::train(&spec, &x, &y, 3)?;
    let probs: Vec<f64> = ds
        .posts()
        .iter()
        .filter_map(|p| corpus.embeddings.get(&p.id))
        .map(|e| model.predict_proba(e))
        .collect();
    let labels = assign_labels(&probs, 0.7);
    println!("{} of {} posts labeled {d}", labels.iter().filter(|&&l| l).count(), labels.len());
    let path = std::env::temp_dir().join(format!("model_{d}.txt"));
    model_file::save(&model, &path)?;
    println!("saved {}", path.display());

    let mut by_coder: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for a in ds.annotations().iter().filter(|a| a.dimension == d) {
        by_coder.entry(&a.coder_id).or_default().insert(&a.post_id, a.value);
    }
    let coders: Vec<&str> = by_coder.keys().copied().collect();
    let pairs: Vec<(usize, usize)> = by_coder[coders[0]]
        .iter()
        .filter_map(|(p, &a)| by_coder[coders[1]].get(p).map(|&b| (a as usize, b as usize)))
        .collect();
    let ac1 = gwet_agreement(&pairs, 2, None)?;
    println!(
        "{} vs {} on {} posts: AC1 {:.3} (raw {:.3}, chance {:.3})",
        coders[0],
        coders[1],
        pairs.len(),
        ac1.coefficient,
        ac1.raw_agreement,
        ac1.chance_agreement
    );
    Ok(())
}
