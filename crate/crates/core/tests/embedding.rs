use std::fmt::Write as _;

use civiscope::embedding::*;
use civiscope::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Text in the layout the Python adapter writes: `json.dumps` spacing,
/// exponent floats, integer components and a trailing blank line.
fn adapter_style_file(n: usize, dim: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut s = format!("{{\"dim\": {dim}, \"model\": \"paraphrase-multilingual-MiniLM-L12-v2\", \"count\": {n}}}\n");
    let mut shared: Vec<f64> = Vec::new();
    for i in 0..n {
        let v: Vec<f64> = if i % 100 == 7 && !shared.is_empty() {
            shared.clone()
        } else {
            (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        if i == 7 {
            shared = v.clone();
        }
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .map(|(k, x)| match k {
                0 => format!("{:e}", x / 1e3),
                1 => "0".to_string(),
                _ => format!("{x}"),
            })
            .collect();
        let _ = writeln!(s, "{{\"id\": \"post_{i:04}\", \"vector\": [{}]}}", parts.join(", "));
    }
    s.push('\n');
    s
}

#[test]
fn adapter_output_loads_and_duplicates_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("embeddings.jsonl");
    std::fs::write(&path, adapter_style_file(1000, 24)).unwrap();
    let store = load_embeddings(&path, Some(24)).unwrap();
    assert_eq!(store.len(), 1000);
    assert_eq!(store.dim(), 24);
    assert_eq!(store.model(), "paraphrase-multilingual-MiniLM-L12-v2");
    let a = store.get("post_0007").unwrap();
    let b = store.get("post_0107").unwrap();
    assert_eq!(cosine_similarity(a, b).unwrap(), 1.0);
    assert_eq!(store.get("post_0001").unwrap()[1], 0.0);
}

#[test]
fn write_and_load_round_trip_exactly() {
    let mut store = EmbeddingStore::new(3, "m").unwrap();
    store.insert("a", &[0.1, -2.5e-17, 3.0]).unwrap();
    store.insert("b", &[1.0 / 3.0, 0.0, -7.25]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.jsonl");
    store.write(&path).unwrap();
    assert_eq!(load_embeddings(&path, None).unwrap(), store);
}

#[test]
fn malformed_embedding_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.jsonl");
    let load = |text: &str, dim: Option<usize>| {
        std::fs::write(&path, text).unwrap();
        load_embeddings(&path, dim)
    };
    let header = "{\"dim\": 2, \"model\": \"m\", \"count\": 1}\n";
    assert!(load(&format!("{header}{{\"id\": \"a\", \"vector\": [1, 2]}}\n"), Some(2)).is_ok());
    assert!(matches!(
        load(&format!("{header}{{\"id\": \"a\", \"vector\": [1, 2]}}\n"), Some(3)),
        Err(Error::DimensionMismatch { expected: 3, found: 2, .. })
    ));
    assert!(matches!(
        load(&format!("{header}{{\"id\": \"a\", \"vector\": [1, 2, 3]}}\n"), None),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        load(&format!("{header}{{\"id\": \"a\", \"vector\": [NaN, 2]}}\n"), None),
        Err(Error::Malformed { line: 2, .. })
    ));
    assert!(load(header, None).is_err(), "count mismatch");
    let two = "{\"dim\": 2, \"model\": \"m\", \"count\": 2}\n";
    assert!(matches!(
        load(&format!("{two}{{\"id\": \"a\", \"vector\": [1, 2]}}\n{{\"id\": \"a\", \"vector\": [1, 2]}}\n"), None),
        Err(Error::DuplicateId(_))
    ));
    assert!(matches!(load("", None), Err(Error::Malformed { .. })));
}

#[test]
fn centroid_and_cosine_hand_values() {
    let mut store = EmbeddingStore::new(2, "m").unwrap();
    store.insert("a", &[1.0, 0.0]).unwrap();
    store.insert("b", &[0.0, 1.0]).unwrap();
    assert_eq!(centroid(&["a", "b"], &store).unwrap(), vec![0.5, 0.5]);
    let c = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
    assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    assert!(centroid(&["zz"], &store).is_err());
    assert_eq!(percentile(&[4.0, 1.0, 3.0, 2.0], 0.5), Some(2.5));
    assert_eq!(percentile(&[], 0.5), None);
}

fn ring_store(n: usize) -> EmbeddingStore {
    let mut store = EmbeddingStore::new(2, "ring").unwrap();
    for i in 0..n {
        let t = std::f64::consts::PI * i as f64 / n as f64;
        store.insert(format!("p{i:03}"), &[t.cos(), t.sin()]).unwrap();
    }
    store
}

fn request(high_k: usize, low_k: usize) -> CandidateRequest {
    CandidateRequest {
        positive_ids: vec!["p000".into()],
        excluded_ids: vec!["p001".into()],
        high_k,
        low_k,
        low_floor: None,
        seed: 3,
        round: 2,
    }
}

#[test]
fn candidate_bands_follow_similarity() {
    let store = ring_store(100);
    let batch = select_candidates(&store, &request(5, 10)).unwrap();
    let high: Vec<&str> = batch.high_band.iter().map(|h| h.0.as_str()).collect();
    assert_eq!(high, ["p002", "p003", "p004", "p005", "p006"]);
    let ceiling = batch.high_band.last().unwrap().1;
    assert_eq!(batch.low_band.len(), 10);
    for (id, s) in &batch.low_band {
        assert!(*s < ceiling && *s >= batch.low_floor, "{id}");
        assert!(id != "p000" && id != "p001");
    }
    assert!(batch.shortfall.is_none());
    assert_eq!(batch.file_name(), "candidates_round_2.csv");

    // 60th percentile of the 98 eligible similarities
    let mut sims: Vec<f64> = (2..100).map(|i| (std::f64::consts::PI * i as f64 / 100.0).cos()).collect();
    sims.sort_by(f64::total_cmp);
    let pos: f64 = 0.6 * 97.0;
    let want = sims[pos as usize] + (sims[pos as usize + 1] - sims[pos as usize]) * (pos - pos.floor());
    assert!((batch.low_floor - want).abs() < 1e-12);

    assert_eq!(select_candidates(&store, &request(5, 10)).unwrap(), batch);
    let reseeded = select_candidates(&store, &CandidateRequest { seed: 4, ..request(5, 10) }).unwrap();
    assert_eq!(reseeded.high_band, batch.high_band);
    assert_ne!(reseeded.low_band, batch.low_band);
}

#[test]
fn short_pools_report_shortfall() {
    let store = ring_store(10);
    let batch = select_candidates(&store, &CandidateRequest { low_floor: Some(0.99), ..request(20, 5) }).unwrap();
    assert_eq!(batch.high_band.len(), 8);
    let s = batch.shortfall.unwrap();
    assert_eq!((s.high, s.low), (12, 5));
    assert!(select_candidates(&store, &CandidateRequest { positive_ids: vec![], ..request(1, 1) }).is_err());
    assert!(select_candidates(&store, &CandidateRequest { low_floor: Some(2.0), ..request(1, 1) }).is_err());
}

#[test]
fn candidate_csv_layout() {
    let store = ring_store(20);
    let batch = select_candidates(&store, &request(2, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(batch.file_name());
    batch.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("post_id,band,similarity"));
    let bands: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(bands, ["high", "high", "low", "low"]);
}

proptest! {
    #[test]
    fn cosine_is_bounded_and_scale_invariant(
        a in prop::collection::vec(-10.0f64..10.0, 4),
        b in prop::collection::vec(-10.0f64..10.0, 4),
        k in 0.1f64..50.0,
    ) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
        let c = cosine_similarity(&a, &b).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - c).abs() < 1e-12);
        prop_assert!((cosine_similarity(&b, &a).unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn bands_never_overlap_or_include_skipped(n in 5usize..80, high_k in 0usize..20, low_k in 0usize..20, seed in 0u64..50) {
        let store = ring_store(n);
        let batch = select_candidates(&store, &CandidateRequest { seed, ..request(high_k, low_k) }).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (id, _) in batch.high_band.iter().chain(&batch.low_band) {
            prop_assert!(seen.insert(id.clone()));
            prop_assert!(id != "p000" && id != "p001");
        }
        prop_assert_eq!(batch.high_band.len(), high_k.min(n - 2));
    }
}
