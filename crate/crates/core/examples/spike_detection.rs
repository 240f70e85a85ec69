//! Daily incivility counts, a fixed-penalty trend, a GCV-tuned smoothing
//! spline and Cook's-distance outlier days.
//!
//!     cargo run --example spike_detection

use civiscope::dynamics::{analyze_series, build_daily_series, default_grid, OutlierRule, DEFAULT_TREND_LAMBDA};
use civiscope::model::{Dimension, LabelSource};
use civiscope::synth::{generate, SynthSpec};

fn main() -> civiscope::Result<()> {
    let corpus = generate(&SynthSpec::default())?;
    let spike = &corpus.truth.spikes[0];

    let series = build_daily_series(&corpus.dataset, Dimension::Imp, LabelSource::Machine)?;
    let res = analyze_series(series, DEFAULT_TREND_LAMBDA, &default_grid(), OutlierRule::TopK(5))?;
    println!(
        "{} days; GCV picked lambda {:.3e} (edf {:.2}); trend edf {:.2}",
        res.series.len(),
        res.gcv.lambda_star,
        res.gcv_fit.edf,
        res.trend.edf
    );
    for o in &res.outliers {
        let date = o.date.unwrap();
        let marker = if date == spike.date { "  <- planted spike" } else { "" };
        println!("  {date}  count {:>4}  D = {:.4}{marker}", res.series.counts[o.index], o.cooks_d);
    }
    Ok(())
}
