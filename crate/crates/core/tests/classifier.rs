use civiscope::classifier::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn clusters(n: usize, positive_every: usize, shift: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nd = Normal::new(0.0, 1.0).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let pos = i % positive_every == 0;
        let mut v: Vec<f64> = (0..5).map(|_| nd.sample(&mut rng)).collect();
        if pos {
            v[1] += shift;
        }
        x.push(v);
        y.push(pos);
    }
    (x, y)
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..5 {
        let x: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let y: Vec<bool> = (0..30).map(|_| rng.random_bool(0.5)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = rng.random_range(-1.0..1.0);
        let l2 = [0.0, 1e-3, 0.5][trial % 3];
        let (_, gw, gb) = loss_and_gradient(&x, &y, &w, b, l2);
        let h = 1e-5;
        for j in 0..4 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let num = (loss_and_gradient(&x, &y, &wp, b, l2).0 - loss_and_gradient(&x, &y, &wm, b, l2).0) / (2.0 * h);
            assert!((num - gw[j]).abs() <= 1e-5 * gw[j].abs().max(1e-3), "trial {trial} w{j}");
        }
        let num = (loss_and_gradient(&x, &y, &w, b + h, l2).0 - loss_and_gradient(&x, &y, &w, b - h, l2).0) / (2.0 * h);
        assert!((num - gb).abs() <= 1e-5 * gb.abs().max(1e-3));
    }
}

#[test]
fn loss_hand_value() {
    // one sample at z = 0: ln 2, gradient (σ(0) − 1)·x = −0.5·x
    let (loss, gw, gb) = loss_and_gradient(&[vec![2.0]], &[true], &[0.0], 0.0, 0.0);
    assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!((gw[0], gb), (-1.0, -0.5));
    let (loss, _, _) = loss_and_gradient(&[vec![0.0]], &[false], &[3.0], 800.0, 2.0);
    assert!((loss - (800.0 + 9.0)).abs() < 1e-9, "softplus stays finite");
    assert_eq!(sigmoid(-800.0), 0.0);
    assert_eq!(sigmoid(800.0), 1.0);
}

#[test]
fn threshold_is_inclusive() {
    assert_eq!(assign_labels(&[0.7, 0.6999999999, 0.70000001, 1.0, 0.0], 0.7), [true, false, true, true, false]);
}

#[test]
fn training_separates_and_is_deterministic() {
    let (x, y) = clusters(300, 3, 5.0, 1);
    let cfg = TrainConfig::default();
    let a = train_logistic(&x, &y, &cfg, 9).unwrap();
    let b = train_logistic(&x, &y, &cfg, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.final_loss < 0.1);
    let acc = x.iter().zip(&y).filter(|(v, &t)| (a.predict_proba(v) >= 0.5) == t).count();
    assert!(acc >= 295, "{acc}");

    let e1 = train_ensemble(&x, &y, &EnsembleConfig::default(), 4).unwrap();
    let e2 = train_ensemble(&x, &y, &EnsembleConfig::default(), 4).unwrap();
    assert_eq!(e1, e2);
    assert_eq!(e1.members.len(), 10);
    let p = e1.predict_proba(&x[0]);
    let mean = e1.members.iter().map(|m| m.predict_proba(&x[0])).sum::<f64>() / 10.0;
    assert!((p - mean).abs() < 1e-15);
}

#[test]
fn degenerate_training_sets_fail() {
    let cfg = TrainConfig::default();
    assert!(train_logistic(&[vec![1.0], vec![2.0]], &[true, true], &cfg, 0).is_err());
    assert!(train_logistic(&[vec![1.0]], &[true], &cfg, 0).is_err());
    assert!(train_logistic(&[vec![1.0], vec![2.0, 3.0]], &[true, false], &cfg, 0).is_err());
    assert!(train_logistic(&[vec![f64::NAN], vec![2.0]], &[true, false], &cfg, 0).is_err());
    let none = EnsembleConfig { members: 0, ..EnsembleConfig::default() };
    assert!(train_ensemble(&[vec![1.0], vec![2.0]], &[true, false], &none, 0).is_err());
}

#[test]
fn balanced_bootstrap_draws_equal_class_counts() {
    let y: Vec<bool> = (0..101).map(|i| i % 10 == 0).collect();
    let mut rng = member_rng(5, 3);
    let idx = bootstrap_indices(&y, true, &mut rng);
    let pos = idx.iter().filter(|&&i| y[i]).count();
    assert_eq!(idx.len(), 102);
    assert_eq!(pos, 51);
    let plain = bootstrap_indices(&y, false, &mut member_rng(5, 3));
    assert_eq!(plain.len(), 101);
    assert_ne!(bootstrap_indices(&y, true, &mut member_rng(5, 4)), idx);
}

#[test]
fn stratified_folds_balance_classes() {
    let y: Vec<bool> = (0..95).map(|i| i % 4 == 0).collect();
    let folds = stratified_folds(&y, 10, 3);
    for class in [true, false] {
        let mut counts = [0usize; 10];
        for (i, &f) in folds.iter().enumerate() {
            if y[i] == class {
                counts[f] += 1;
            }
        }
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        assert!(hi - lo <= 1, "{class}: {counts:?}");
    }
    assert_eq!(stratified_folds(&y, 10, 3), folds);
}

#[test]
fn confusion_and_metrics_hand_values() {
    let truth = [true, true, true, false, false, false, false, true];
    let pred = [true, true, false, false, true, false, false, true];
    let c = Confusion::from_predictions(&truth, &pred);
    assert_eq!((c.tp, c.fp, c.tn, c.fn_), (3, 1, 3, 1));
    let m = BinaryMetrics::from_confusion(&c);
    assert!((m.positive.precision - 0.75).abs() < 1e-15);
    assert!((m.positive.f1 - 0.75).abs() < 1e-15);
    assert!((m.weighted_f1 - 0.75).abs() < 1e-15);
    assert!((m.accuracy - 0.75).abs() < 1e-15);

    let c = Confusion { tp: 0, fp: 0, tn: 5, fn_: 2 };
    let m = BinaryMetrics::from_confusion(&c);
    assert_eq!(m.positive.f1, 0.0);
    assert!((m.negative.precision - 5.0 / 7.0).abs() < 1e-15);
}

#[test]
fn pooled_cross_validation_covers_every_sample_once() {
    let (x, y) = clusters(200, 4, 6.0, 2);
    let r = cross_validate(&x, &y, 10, &ClassifierSpec::default(), 1, 0.7).unwrap();
    assert_eq!(r.confusion.total(), 200);
    assert_eq!(r.probabilities.len(), 200);
    assert!(r.metrics.positive.f1 > 0.95);
    let again = cross_validate(&x, &y, 10, &ClassifierSpec::default(), 1, 0.7).unwrap();
    assert_eq!(r, again);
    assert!(cross_validate(&x, &y, 1, &ClassifierSpec::default(), 1, 0.7).is_err());
    assert!(cross_validate(&x[..5], &y[..5], 10, &ClassifierSpec::default(), 1, 0.7).is_err());
}

#[test]
fn model_files_round_trip() {
    let (x, y) = clusters(80, 2, 4.0, 3);
    for spec in [
        ClassifierSpec::Logistic(TrainConfig::default()),
        ClassifierSpec::Ensemble(EnsembleConfig { members: 3, ..EnsembleConfig::default() }),
    ] {
        let m = Classifier::train(&spec, &x, &y, 7).unwrap();
        let back = model_file::from_text(&model_file::to_text(&m)).unwrap();
        for v in &x {
            assert_eq!(m.predict_proba(v), back.predict_proba(v));
        }
        assert_eq!(back.dim(), 5);
    }
    let hand = "civiscope-logistic v1\ndim 3\nl2 0.001\nseed 7\nbias -0.25\nweights 0.5 1.25 -3\n";
    let m = model_file::from_text(hand).unwrap();
    assert!((m.predict_proba(&[0.0, 0.0, 0.0]) - sigmoid(-0.25)).abs() < 1e-15);
    assert!(model_file::from_text("civiscope-logistic v1\ndim 2\nl2 0\nseed 1\nbias 0\nweights 1\n").is_err());
    assert!(model_file::from_text("something else\n").is_err());
    assert!(model_file::from_text("civiscope-ensemble v1\nmembers 0\n").is_err());
}

#[test]
fn gwet_hand_values_and_errors() {
    // 2 categories, 10 items: 4 both-1, 4 both-0, 2 split → pa = 0.8, π = (0.5, 0.5), pe = 0.5
    let mut pairs = vec![(1, 1); 4];
    pairs.extend(vec![(0, 0); 4]);
    pairs.extend([(0, 1), (1, 0)]);
    let a = gwet_agreement(&pairs, 2, None).unwrap();
    assert!((a.raw_agreement - 0.8).abs() < 1e-15);
    assert!((a.chance_agreement - 0.5).abs() < 1e-15);
    assert!((a.coefficient - 0.6).abs() < 1e-12);

    // skewed prevalence: π₁ = 0.1, pe = 2·0.1·0.9 = 0.18, AC1 = 0.72/0.82
    let mut skew = vec![(0, 0); 85];
    skew.extend(vec![(1, 1); 5]);
    skew.extend(vec![(0, 1); 6]);
    skew.extend(vec![(1, 0); 4]);
    assert!((gwet_agreement(&skew, 2, None).unwrap().coefficient - 0.72 / 0.82).abs() < 1e-12);

    assert!(gwet_agreement(&[(0, 0)], 2, None).is_err());
    assert!(gwet_agreement(&[(0, 3), (0, 0)], 2, None).is_err());
    let asym = vec![vec![1.0, 0.2], vec![0.3, 1.0]];
    assert!(gwet_agreement(&pairs, 2, Some(&asym)).is_err());
    let bad_diag = vec![vec![0.9, 0.0], vec![0.0, 1.0]];
    assert!(gwet_agreement(&pairs, 2, Some(&bad_diag)).is_err());
}

proptest! {
    #[test]
    fn gwet_is_symmetric_and_bounded(pairs in prop::collection::vec((0usize..3, 0usize..3), 2..60)) {
        let forward = gwet_agreement(&pairs, 3, None);
        let flipped: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        let backward = gwet_agreement(&flipped, 3, None);
        match (forward, backward) {
            (Ok(f), Ok(b)) => {
                prop_assert!((f.coefficient - b.coefficient).abs() < 1e-12);
                prop_assert!(f.coefficient <= 1.0 + 1e-12);
                prop_assert!((0.0..=1.0).contains(&f.raw_agreement));
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "symmetry of errors"),
        }
    }

    #[test]
    fn probabilities_are_in_unit_interval(z in -1e3f64..1e3) {
        let p = sigmoid(z);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((sigmoid(-z) - (1.0 - p)).abs() < 1e-12);
    }
}
