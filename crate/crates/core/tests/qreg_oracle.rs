mod common;

use civiscope::audience::qreg::objective;
use civiscope::audience::{fit_quantile_line, quantile_regression};
use common::oracles::qreg_vertex_enumeration;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(10..=50);
    let ties = seed % 3 == 0;
    let x: Vec<f64> = (0..n)
        .map(|_| if ties { rng.random_range(0..6) as f64 / 5.0 } else { rng.random_range(0.0..1.0) })
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| {
            if ties {
                (10.0 * v + rng.random_range(0..8) as f64).round()
            } else {
                3.0 - 2.0 * v + rng.random_range(-1.0..1.0) * (1.0 + v)
            }
        })
        .collect();
    (x, y)
}

#[test]
fn exact_solver_matches_vertex_enumeration() {
    for seed in 0..200u64 {
        let (x, y) = instance(seed);
        for tau in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let got = fit_quantile_line(&x, &y, tau).unwrap();
            let (want, _, _) = qreg_vertex_enumeration(&x, &y, tau);
            assert!((got.objective - want).abs() <= 1e-6, "seed {seed} τ {tau}: {} vs {want}", got.objective);
            let recomputed = objective(&x, &y, tau, got.beta0, got.beta1);
            assert!((recomputed - got.objective).abs() <= 1e-9);
        }
    }
}

#[test]
fn residual_signs_bracket_tau() {
    for seed in 0..100u64 {
        let (x, y) = instance(seed);
        let n = x.len() as f64;
        for tau in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let l = fit_quantile_line(&x, &y, tau).unwrap();
            let r: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - l.beta0 - l.beta1 * a).collect();
            let neg = r.iter().filter(|&&v| v < -1e-9).count() as f64;
            let pos = r.iter().filter(|&&v| v > 1e-9).count() as f64;
            assert!(neg <= tau * n + 1e-9 && pos <= (1.0 - tau) * n + 1e-9, "seed {seed} τ {tau}");
            // in general position exactly two residuals vanish
            if seed % 3 != 0 {
                assert!((neg / n - tau).abs() <= 2.0 / n + 1e-12, "seed {seed} τ {tau}");
            }
        }
    }
}

#[test]
fn heteroskedastic_slopes_fan_out() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x: Vec<f64> = (0..300).map(|_| rng.random_range(0.0..5.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| 1.0 + v + rng.random_range(-1.0..1.0) * (0.1 + v)).collect();
    let fits = quantile_regression(&x, &y, &[0.1, 0.5, 0.9], 0, 0).unwrap();
    assert!(fits[0].beta1 < fits[1].beta1 && fits[1].beta1 < fits[2].beta1);
    assert!(fits.iter().all(|f| f.beta0_p.is_nan() && f.replicates == 0));
}

#[test]
fn bootstrap_is_seeded_and_brackets_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..60).map(|_| rng.random_range(0.0..1.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| 0.5 + 4.0 * v + rng.random_range(-0.5..0.5)).collect();
    let a = quantile_regression(&x, &y, &[0.5], 200, 9).unwrap();
    let b = quantile_regression(&x, &y, &[0.5], 200, 9).unwrap();
    assert_eq!(a, b);
    let f = &a[0];
    assert!(f.beta1_ci.low < f.beta1 && f.beta1 < f.beta1_ci.high);
    assert!(f.beta1_p < 0.01);
    let c = quantile_regression(&x, &y, &[0.5], 200, 10).unwrap();
    assert_ne!(a[0].beta1_ci, c[0].beta1_ci);
}

#[test]
fn invalid_inputs_are_rejected() {
    let x = [1.0, 1.0, 1.0];
    assert!(fit_quantile_line(&x, &[1.0, 2.0, 3.0], 0.5).is_err());
    assert!(fit_quantile_line(&[0.0, 1.0], &[1.0, 2.0], 1.0).is_err());
    assert!(fit_quantile_line(&[0.0, 1.0], &[1.0, f64::NAN], 0.5).is_err());
    let short: Vec<f64> = (0..5).map(f64::from).collect();
    assert!(quantile_regression(&short, &short, &[0.5], 10, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_is_equivariant_under_affine_shift(
        pts in prop::collection::vec((0.0f64..10.0, -20.0f64..20.0), 6..30),
        a in -3.0f64..3.0,
        c in -5.0f64..5.0,
        tau in 0.05f64..0.95,
    ) {
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        prop_assume!(x.windows(2).any(|w| w[0] != w[1]));
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let shifted: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi + a * xi + c).collect();
        let base = fit_quantile_line(&x, &y, tau).unwrap();
        let moved = fit_quantile_line(&x, &shifted, tau).unwrap();
        prop_assert!((base.objective - moved.objective).abs() <= 1e-7 * (1.0 + base.objective));
    }

    #[test]
    fn never_beaten_by_vertex_enumeration(
        pts in prop::collection::vec((0.0f64..1.0, -5.0f64..5.0), 3..25),
        tau in 0.05f64..0.95,
    ) {
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        prop_assume!(x.windows(2).any(|w| w[0] != w[1]));
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let got = fit_quantile_line(&x, &y, tau).unwrap();
        let (want, _, _) = qreg_vertex_enumeration(&x, &y, tau);
        prop_assert!((got.objective - want).abs() <= 1e-6 * (1.0 + want));
    }
}
