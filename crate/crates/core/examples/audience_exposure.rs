//! Incivility density and survey-audience exposure per influencer, quantile
//! regression of exposure on density, and a G-test of account type against
//! density quartile.
//!
//!     cargo run --example audience_exposure

use civiscope::audience::{crosstab, g_test, quantile_groups, quantile_regression, AudienceIndex, ExposureMode};
use civiscope::model::{Dimension, LabelSource};
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let ds = &corpus.dataset;
    let d = Dimension::Imp;
    let index = AudienceIndex::new(ds);

    let (dens, excluded) = index.densities(d, LabelSource::Machine);
    let exps: Vec<_> = dens
        .iter()
        .map(|r| index.exposure_count(&r.influencer_id, d, LabelSource::Machine, ExposureMode::PerPost))
        .collect();
    println!("{} influencers with posts, {} without", dens.len(), excluded.len());

    let x: Vec<f64> = dens.iter().map(|r| r.density).collect();
    let y: Vec<f64> = exps.iter().map(|r| r.exposure as f64).collect();
    for f in quantile_regression(&x, &y, &[0.1, 0.5, 0.9], 200, 11)? {
        println!(
            "  tau {:.2}: exposure = {:8.1} + {:8.1} * density   95% CI for slope [{:.1}, {:.1}], p = {:.3}",
            f.tau, f.beta0, f.beta1, f.beta1_ci.low, f.beta1_ci.high, f.beta1_p
        );
    }

    let keyed: Vec<(&str, f64)> = dens.iter().map(|r| (r.influencer_id.as_str(), r.density)).collect();
    let q = quantile_groups(&keyed, 4)?;
    let pairs = dens.iter().zip(&q).map(|(r, &g)| {
        let t = ds.account(&r.influencer_id).unwrap().account_type;
        (t.to_string(), format!("Q{g}"))
    });
    let table = crosstab(pairs, None, None);
    let g = g_test(&table)?;
    println!("account type x density quartile: G = {:.3}, df = {}, p = {:.3}", g.statistic, g.df, g.p);
    Ok(())
}
