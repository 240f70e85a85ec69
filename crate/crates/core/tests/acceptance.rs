//! Acceptance suite: one line per criterion, printed as PASS or FAIL with
//! the measured quantity and wall time. Run with
//! `cargo test -p civiscope --test acceptance -- --nocapture`.
//!
//! Criteria listed in `KNOWN_RED` are reported as FAIL and the test asserts
//! that they still fail, so a fix shows up as a test failure that asks for
//! the list to be updated.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use civiscope::audience::{
    chi_square_test, fit_quantile_line, g_test, jaccard, mann_whitney_u, ContingencyTable,
};
use civiscope::classifier::{
    assign_labels, cross_validate, gwet_agreement, loss_and_gradient, ClassifierSpec,
};
use civiscope::dynamics::{
    cooks_distance, default_grid, detect_outliers, fit_smoothing_spline, select_lambda_gcv, OutlierRule,
};
use civiscope::flow::{
    build_bipartite, build_retweet_graph, count_motifs, motif_zscores, null_replicates, pagerank,
    randomize_retweets, DimensionFilter, Motif, NullConfig, NullScope, PageRankConfig,
};
use civiscope::model::{Dimension, LabelSource};
use civiscope::synth::{generate, SynthSpec};
use common::fixtures::random_flow_dataset;
use common::oracles::{
    brute_force_motifs, dense_pagerank, dense_spline_qr_form, ols_line, qreg_vertex_enumeration,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const KNOWN_RED: &[&str] = &["spline"];

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    Outcome {
        name,
        pass,
        detail,
        elapsed: t.elapsed(),
    }
}

fn imp_machine() -> Option<DimensionFilter> {
    Some(DimensionFilter {
        dimension: Dimension::Imp,
        source: LabelSource::Machine,
    })
}

fn motif_census() -> (bool, String) {
    let t = Instant::now();
    let mut mismatches = 0;
    let mut total = 0;
    for seed in 0..50 {
        let ds = random_flow_dataset(seed, 30, 20, 200);
        let c = count_motifs(&build_bipartite(&ds), &build_retweet_graph(&ds, imp_machine()));
        let want = brute_force_motifs(&ds);
        let got = [
            c.counts.get(Motif::Direct),
            c.counts.get(Motif::TwoStep),
            c.counts.get(Motif::Mixed),
        ];
        total += want.iter().sum::<u64>();
        if got != want {
            mismatches += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        mismatches == 0 && secs < 5.0,
        format!("50 instances, {mismatches} mismatches, {total} motif instances, {secs:.2}s (limit 5s)"),
    )
}

fn null_model() -> (bool, String) {
    let t = Instant::now();
    let corpus = generate(&SynthSpec::default()).unwrap();
    let g = build_bipartite(&corpus.dataset);
    let r = build_retweet_graph(&corpus.dataset, imp_machine());
    let (out0, in0) = (r.out_degrees(), r.in_degrees());

    let mut degree_failures = 0;
    for seed in 0..100 {
        let rr = randomize_retweets(&r, seed, 10, NullScope::AllEdges).unwrap();
        if rr.out_degrees() != out0 || rr.in_degrees() != in0 {
            degree_failures += 1;
        }
    }
    // null_replicates asserts degree preservation on every replicate itself
    let _ = null_replicates(&g, &r, &NullConfig::default());

    let mut consistent = 0;
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let rr = randomize_retweets(&r, 1000 + trial, 10, NullScope::AllEdges).unwrap();
        let z = motif_zscores(&g, &rr, &NullConfig { seed: trial, ..NullConfig::default() }).unwrap();
        let m = Motif::ALL
            .iter()
            .map(|&m| z.get(m).z.map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max);
        worst = worst.max(m);
        if m < 3.0 {
            consistent += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        degree_failures == 0 && consistent >= 95 && secs < 60.0,
        format!(
            "degrees preserved on 100/100 randomizations: {}; |z|<3 in {consistent}/100 meta-trials (need 95, worst {worst:.2}); {secs:.1}s (limit 60s)",
            degree_failures == 0
        ),
    )
}

fn planted_signature() -> (bool, String) {
    let t = Instant::now();
    let corpus = generate(&SynthSpec::default()).unwrap();
    let g = build_bipartite(&corpus.dataset);
    let r = build_retweet_graph(&corpus.dataset, imp_machine());
    let cfg = NullConfig {
        replicates: 100,
        ..NullConfig::default()
    };
    let z = motif_zscores(&g, &r, &cfg).unwrap();
    let zm = z.mixed.z.unwrap_or(f64::NAN);
    let zt = z.two_step.z.unwrap_or(f64::NAN);
    let secs = t.elapsed().as_secs_f64();
    (
        zm > 3.0 && zt < 0.0 && secs < 120.0,
        format!("z_mixed {zm:.2} (> 3), z_two_step {zt:.2} (< 0), 100 replicates, {secs:.1}s (limit 120s)"),
    )
}

fn spline() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut dense_err = 0.0f64;
    for &n in &[5usize, 12, 40, 92] {
        let x: Vec<f64> = (0..n).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..40.0)).collect();
        for &lambda in &[1e-5, 0.6, 50.0] {
            let fit = fit_smoothing_spline(&x, &y, lambda).unwrap();
            let f = dense_spline_qr_form(&x, &y, lambda);
            dense_err = fit.fitted.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(dense_err, f64::max);
        }
    }

    let x: Vec<f64> = (0..92).map(|i| i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 5.0 + 0.3 * v + rng.random_range(-3.0..3.0)).collect();
    let (b0, b1, _) = ols_line(&x, &y);
    let fit = fit_smoothing_spline(&x, &y, 1e10).unwrap();
    let ols_err = x
        .iter()
        .zip(&fit.fitted)
        .map(|(xi, f)| (f - (b0 + b1 * xi)).abs())
        .fold(0.0, f64::max);

    let grid = default_grid();
    let largest = *grid.last().unwrap();
    let noise = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let y: Vec<f64> = (0..92).map(|_| 20.0 + nd.sample(&mut rng)).collect();
        select_lambda_gcv(&x, &y, &grid).unwrap().lambda_star
    };
    let lambda0 = noise(0);
    let rate = (0..200).filter(|&s| noise(s) == largest).count();

    (
        dense_err < 1e-8 && ols_err < 1e-6 && lambda0 == largest,
        format!(
            "dense-oracle max error {dense_err:.1e} (< 1e-8); λ=1e10 vs OLS {ols_err:.1e} (< 1e-6); \
             pure noise n=92 seed 0: GCV λ* = {lambda0:.3e}, largest grid λ = {largest:e}; \
             largest chosen on {rate}/200 seeds"
        ),
    )
}

fn outlier_power() -> (bool, String) {
    let grid = default_grid();
    let x: Vec<f64> = (0..92).map(|i| i as f64).collect();
    let mut hits = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nd = Normal::new(0.0, 1.0).unwrap();
        let mut y: Vec<f64> = (0..92).map(|_| 20.0 + nd.sample(&mut rng)).collect();
        let day = rng.random_range(0..92);
        y[day] += 10.0;
        let sel = select_lambda_gcv(&x, &y, &grid).unwrap();
        let top = detect_outliers(&cooks_distance(&sel.best_fit), None, OutlierRule::TopK(1));
        if top.first().map(|o| o.index) == Some(day) {
            hits += 1;
        }
    }
    (hits >= 95, format!("10σ spike ranked first in {hits}/100 trials (need 95)"))
}

fn quantile_regression() -> (bool, String) {
    let mut worst_obj = 0.0f64;
    let mut worst_frac = 0.0f64;
    let mut frac_ok = true;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(8..=50);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 1.0 + 2.0 * v + rng.random_range(-1.0..1.0) * (0.5 + v))
            .collect();
        let tau = [0.1, 0.25, 0.5, 0.75, 0.9][seed as usize % 5];
        let fit = fit_quantile_line(&x, &y, tau).unwrap();
        let (want, _, _) = qreg_vertex_enumeration(&x, &y, tau);
        worst_obj = worst_obj.max((fit.objective - want).abs());
        let neg = x
            .iter()
            .zip(&y)
            .filter(|&(a, b)| b - fit.beta0 - fit.beta1 * a < -1e-9)
            .count();
        let dev = (neg as f64 / n as f64 - tau).abs();
        worst_frac = worst_frac.max(dev * n as f64);
        frac_ok &= dev <= 2.0 / n as f64 + 1e-12;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let nd = Normal::new(0.0, 1.0).unwrap();
    let x: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 2.0 + 0.5 * v + (0.2 + 0.3 * v) * nd.sample(&mut rng))
        .collect();
    let lo = fit_quantile_line(&x, &y, 0.1).unwrap().beta1;
    let hi = fit_quantile_line(&x, &y, 0.9).unwrap().beta1;

    (
        worst_obj <= 1e-6 && frac_ok && hi > lo,
        format!(
            "50 instances: max |objective − LP optimum| {worst_obj:.1e} (≤ 1e-6); \
             max |neg fraction − τ|·n = {worst_frac:.2} (≤ 2); heteroskedastic β1(0.9) {hi:.3} > β1(0.1) {lo:.3}"
        ),
    )
}

fn classifier() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<Vec<f64>> = (0..40).map(|_| (0..6).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let y: Vec<bool> = (0..40).map(|_| rng.random_bool(0.4)).collect();
    let w: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b = 0.3;
    let l2 = 0.05;
    let (_, gw, gb) = loss_and_gradient(&x, &y, &w, b, l2);
    let h = 1e-5;
    let rel = |analytic: f64, numeric: f64| (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
    let mut worst = 0.0f64;
    for j in 0..w.len() {
        let (mut wp, mut wm) = (w.clone(), w.clone());
        wp[j] += h;
        wm[j] -= h;
        let num = (loss_and_gradient(&x, &y, &wp, b, l2).0 - loss_and_gradient(&x, &y, &wm, b, l2).0) / (2.0 * h);
        worst = worst.max(rel(gw[j], num));
    }
    let num_b = (loss_and_gradient(&x, &y, &w, b + h, l2).0 - loss_and_gradient(&x, &y, &w, b - h, l2).0) / (2.0 * h);
    worst = worst.max(rel(gb, num_b));

    let nd = Normal::new(0.0, 1.0).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..600 {
        let positive = i % 4 == 0;
        let mut v: Vec<f64> = (0..16).map(|_| nd.sample(&mut rng)).collect();
        if positive {
            v[0] += 6.0;
        }
        xs.push(v);
        ys.push(positive);
    }
    let report = cross_validate(&xs, &ys, 10, &ClassifierSpec::default(), 5, 0.7).unwrap();
    let f1 = report.metrics.positive.f1;

    let boundary = assign_labels(&[0.7, 0.7 - 1e-12, 0.7 + 1e-12, 0.69, 1.0, 0.0], 0.7);
    let boundary_ok = boundary == [true, false, true, false, true, false];

    (
        worst < 1e-5 && f1 >= 0.95 && boundary_ok,
        format!(
            "gradient max rel error {worst:.1e} (< 1e-5); 10-fold pooled positive-class F1 {f1:.3} \
             (weighted {:.3}, need 0.95); 0.70 boundary inclusive: {boundary_ok}",
            report.metrics.weighted_f1
        ),
    )
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn brute_g(cells: &[Vec<u64>]) -> (f64, f64) {
    let n: f64 = cells.iter().flatten().sum::<u64>() as f64;
    let (mut g, mut x2) = (0.0, 0.0);
    for (i, row) in cells.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let r: u64 = cells[i].iter().sum();
            let c: u64 = cells.iter().map(|row| row[j]).sum();
            let e = r as f64 * c as f64 / n;
            if o > 0 {
                g += 2.0 * o as f64 * (o as f64 / e).ln();
            }
            x2 += (o as f64 - e).powi(2) / e;
        }
    }
    (g, x2)
}

fn statistics() -> (bool, String) {
    let mut failures: Vec<String> = Vec::new();
    let mut check = |what: String, ok: bool| {
        if !ok {
            failures.push(what);
        }
    };

    // p-values from an independent chi-square implementation, cross-checked
    // against the df-2 and df-4 closed forms below
    let tables: [(Vec<Vec<u64>>, f64, f64); 3] = [
        (vec![vec![10, 20], vec![30, 40]], 0.36979636792989645, 0.37299848361348686),
        (vec![vec![12, 5, 9], vec![7, 14, 3]], 0.0120959036094164, 0.014174882222918836),
        (
            vec![vec![20, 15, 10], vec![10, 25, 15], vec![5, 10, 30]],
            1.275286448689806e-05,
            7.743865934208057e-06,
        ),
    ];
    let closed_form = |x: f64, df: usize| match df {
        2 => Some((-x / 2.0).exp()),
        4 => Some((-x / 2.0).exp() * (1.0 + x / 2.0)),
        _ => None,
    };
    for (k, (cells, pg, px)) in tables.iter().enumerate() {
        let table = ContingencyTable::from_cells(cells.clone()).unwrap();
        let (g, x2) = brute_g(cells);
        let gt = g_test(&table).unwrap();
        let ct = chi_square_test(&table).unwrap();
        check(format!("G statistic table {k}"), close(gt.statistic, g, 1e-10));
        check(format!("χ² statistic table {k}"), close(ct.statistic, x2, 1e-10));
        check(format!("G p table {k}"), close(gt.p, *pg, 1e-4));
        check(format!("χ² p table {k}"), close(ct.p, *px, 1e-4));
        if let Some(p) = closed_form(gt.statistic, gt.df) {
            check(format!("G closed-form p table {k}"), close(gt.p, p, 1e-10));
        }
    }
    let critical = civiscope::audience::chi_square_sf(3.841458820694124, 1);
    check("χ²₁ sf at 3.8415".into(), close(critical, 0.05, 1e-4));

    let samples: [(&[f64], &[f64], f64); 4] = [
        (&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.049534613435626706),
        (&[1.0, 2.0, 2.0, 3.0, 5.0], &[2.0, 3.0, 4.0, 4.0, 6.0, 7.0], 0.11560643738731947),
        (&[3.1, 0.5, 2.2, 7.0], &[1.0, 4.4, 5.5], 0.7236736098317631),
        (&[5.0, 5.0, 5.0, 1.0], &[5.0, 2.0, 8.0], 0.5584521572831558),
    ];
    for (k, (a, b, p)) in samples.iter().enumerate() {
        let u_brute: f64 = a
            .iter()
            .map(|x| {
                b.iter()
                    .map(|y| if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 })
                    .sum::<f64>()
            })
            .sum();
        let got = mann_whitney_u(a, b).unwrap();
        check(format!("U sample {k}"), close(got.u, u_brute, 1e-10));
        check(format!("MWU p sample {k}"), close(got.p, *p, 1e-4));
    }

    let sets: [(&[u32], &[u32]); 4] = [(&[1, 2, 3], &[2, 3, 4, 5]), (&[], &[]), (&[1, 2], &[3]), (&[7, 8, 9], &[9, 8, 7])];
    for (k, (a, b)) in sets.iter().enumerate() {
        let inter = a.iter().filter(|v| b.contains(v)).count();
        let union = a.len() + b.iter().filter(|v| !a.contains(v)).count();
        let want = if union == 0 { 1.0 } else { inter as f64 / union as f64 };
        let sa: BTreeSet<u32> = a.iter().copied().collect();
        let sb: BTreeSet<u32> = b.iter().copied().collect();
        check(format!("Jaccard pair {k}"), close(jaccard(&sa, &sb), want, 1e-10));
    }

    let mut p1 = vec![(1, 1); 40];
    p1.extend(vec![(0, 0); 30]);
    p1.extend(vec![(1, 0); 20]);
    p1.extend(vec![(0, 1); 10]);
    let p2 = vec![(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 2), (0, 0), (2, 0), (1, 1), (2, 2)];
    let mut p3 = p2.clone();
    p3.extend([(0, 2), (1, 0)]);
    let ordinal = vec![vec![1.0, 0.5, 0.0], vec![0.5, 1.0, 0.5], vec![0.0, 0.5, 1.0]];
    // hand values: pa − pe over 1 − pe with pe = T_w/(q(q−1)) Σ π(1−π)
    let gwet_cases: [(&[(usize, usize)], usize, Option<&[Vec<f64>]>, f64); 3] = [
        (&p1, 2, None, (0.7 - 0.495) / (1.0 - 0.495)),
        (&p2, 3, None, (0.7 - 0.33) / (1.0 - 0.33)),
        (&p3, 3, Some(&ordinal), 0.34799482535575677),
    ];
    for (k, (pairs, q, w, want)) in gwet_cases.iter().enumerate() {
        let got = gwet_agreement(pairs, *q, *w).unwrap();
        check(format!("Gwet case {k}"), close(got.coefficient, *want, 1e-10));
        let flipped: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        let sym = gwet_agreement(&flipped, *q, *w).unwrap();
        check(format!("Gwet symmetry case {k}"), close(sym.coefficient, got.coefficient, 1e-12));
    }

    let ok = failures.is_empty();
    let detail = if ok {
        "3 G-test, 3 χ², 4 Mann–Whitney, 4 Jaccard, 3 Gwet instances match".to_string()
    } else {
        format!("mismatches: {}", failures.join(", "))
    };
    (ok, detail)
}

fn pagerank_checks() -> (bool, String) {
    let cfg = PageRankConfig::default();
    let n = 12;
    let cycle: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    let (r, _, _) = pagerank(n, &cycle, &cfg).unwrap();
    let uniform = r.iter().map(|v| (v - 1.0 / n as f64).abs()).fold(0.0, f64::max);

    let mut worst_sum = (r.iter().sum::<f64>() - 1.0).abs();
    let mut worst_dense = 0.0f64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links: Vec<(usize, usize, f64)> = (0..rng.random_range(20..300))
            .map(|_| (rng.random_range(0..50), rng.random_range(0..50), rng.random_range(1..5) as f64))
            .collect();
        let (got, _, _) = pagerank(50, &links, &cfg).unwrap();
        let want = dense_pagerank(50, &links, cfg.damping);
        worst_sum = worst_sum.max((got.iter().sum::<f64>() - 1.0).abs());
        worst_dense = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(worst_dense, f64::max);
    }
    (
        uniform < 1e-10 && worst_sum < 1e-10 && worst_dense < 1e-8,
        format!(
            "cycle deviation {uniform:.1e} (< 1e-10); max |Σ−1| {worst_sum:.1e} (< 1e-10); \
             20 random 50-node graphs vs dense {worst_dense:.1e} (< 1e-8)"
        ),
    )
}

const FULL_PIPELINE: [&str; 10] = [
    "synth",
    "ingest",
    "influencers",
    "select-candidates",
    "train",
    "classify",
    "dynamics",
    "audience",
    "flow",
    "report",
];

fn pipeline_run(dir: &Path) -> Result<Vec<u8>, String> {
    for sub in FULL_PIPELINE {
        let out = Command::new(env!("CARGO_BIN_EXE_civiscope"))
            .args([sub, "--seed", "42"])
            .current_dir(dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{sub}: {}", String::from_utf8_lossy(&out.stderr).trim()));
        }
    }
    std::fs::read(dir.join("out/report.json")).map_err(|e| e.to_string())
}

fn end_to_end() -> (bool, String) {
    let t = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ra, rb) = match (pipeline_run(a.path()), pipeline_run(b.path())) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return (false, format!("pipeline failed: {e}")),
    };
    let secs = t.elapsed().as_secs_f64();
    let identical = ra == rb;
    (
        identical && secs < 300.0,
        format!(
            "two runs of {} subcommands: report.json byte-identical: {identical} ({} bytes); {secs:.0}s (limit 300s)",
            FULL_PIPELINE.len(),
            ra.len()
        ),
    )
}

#[test]
fn acceptance() {
    let outcomes = vec![
        run("motif-census", motif_census),
        run("null-model", null_model),
        run("planted-signature", planted_signature),
        run("spline", spline),
        run("outlier-power", outlier_power),
        run("quantile-regression", quantile_regression),
        run("classifier", classifier),
        run("statistics", statistics),
        run("pagerank", pagerank_checks),
        run("end-to-end", end_to_end),
    ];
    println!();
    for o in &outcomes {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        let known = if KNOWN_RED.contains(&o.name) { " [known red]" } else { "" };
        println!(
            "{mark} {:<20} {:>7.2}s  {}{known}",
            o.name,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", outcomes.len());

    for o in &outcomes {
        if KNOWN_RED.contains(&o.name) {
            assert!(!o.pass, "{} now passes; remove it from KNOWN_RED", o.name);
        } else {
            assert!(o.pass, "{} failed: {}", o.name, o.detail);
        }
    }
}
