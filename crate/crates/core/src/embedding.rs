//! Embedding store and the vector operations behind candidate selection for
//! annotation rounds: positive-class centroid, cosine ranking, and the
//! two-band (high similarity / "not too far") sample.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default percentile of the eligible-similarity distribution used as the
/// lower edge of the low band.
pub const DEFAULT_LOW_FLOOR_PERCENTILE: f64 = 0.6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingHeader {
    pub dim: usize,
    pub model: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EmbeddingRecord {
    id: String,
    vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    model: String,
    ids: Vec<String>,
    data: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, model: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        Ok(EmbeddingStore {
            dim,
            model: model.into(),
            ids: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: &[f64]) -> Result<()> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
                id,
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("non-finite component in `{id}`")));
        }
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), self.row(i)))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let ctx = || format!("writing {}", path.display());
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        let header = EmbeddingHeader {
            dim: self.dim,
            model: self.model.clone(),
            count: self.len(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n").map_err(|e| Error::io(ctx(), e))?;
        for (id, v) in self.iter() {
            serde_json::to_writer(
                &mut w,
                &EmbeddingRecord {
                    id: id.to_string(),
                    vector: v.to_vec(),
                },
            )?;
            w.write_all(b"\n").map_err(|e| Error::io(ctx(), e))?;
        }
        w.flush().map_err(|e| Error::io(ctx(), e))
    }
}

/// Loads an embeddings file: a `{"dim","model","count"}` header line followed
/// by one `{"id","vector"}` record per line.
pub fn load_embeddings(path: &Path, expected_dim: Option<usize>) -> Result<EmbeddingStore> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let malformed = |line: usize, reason: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let header: EmbeddingHeader = loop {
        match lines.next() {
            None => return Err(malformed(1, "missing header line".into())),
            Some((i, l)) => {
                let l = l.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                if l.trim().is_empty() {
                    continue;
                }
                break serde_json::from_str(&l).map_err(|e| malformed(i + 1, e.to_string()))?;
            }
        }
    };
    if let Some(d) = expected_dim {
        if d != header.dim {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: header.dim,
                id: "<header>".into(),
            });
        }
    }
    let mut store = EmbeddingStore::new(header.dim, header.model.clone())?;
    for (i, l) in lines {
        let l = l.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if l.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingRecord =
            serde_json::from_str(&l).map_err(|e| malformed(i + 1, e.to_string()))?;
        store.insert(rec.id, &rec.vector)?;
    }
    if store.len() != header.count {
        return Err(Error::invalid(format!(
            "{}: header declares {} vectors, found {}",
            path.display(),
            header.count,
            store.len()
        )));
    }
    Ok(store)
}

/// Component-wise mean of the vectors for `ids`.
pub fn centroid<S: AsRef<str>>(ids: &[S], store: &EmbeddingStore) -> Result<Vec<f64>> {
    if ids.is_empty() {
        return Err(Error::invalid("centroid of an empty id set"));
    }
    let mut acc = vec![0.0; store.dim()];
    for id in ids {
        let id = id.as_ref();
        let v = store.get(id).ok_or_else(|| Error::DanglingReference {
            kind: "embedding id",
            id: id.to_string(),
        })?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = ids.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
            id: "<vector>".into(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid("cosine similarity of a zero-norm vector"));
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Linear-interpolation percentile (`q` in `[0,1]`) of unsorted values.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRequest {
    pub positive_ids: Vec<String>,
    pub excluded_ids: Vec<String>,
    pub high_k: usize,
    pub low_k: usize,
    /// Lower similarity edge of the low band; `None` selects the 60th percentile.
    pub low_floor: Option<f64>,
    pub seed: u64,
    pub round: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Shortfall {
    pub high: usize,
    pub low: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateBatch {
    pub high_band: Vec<(String, f64)>,
    pub low_band: Vec<(String, f64)>,
    pub round: u32,
    pub low_floor: f64,
    pub shortfall: Option<Shortfall>,
}

#[derive(Serialize)]
struct CandidateRow<'a> {
    post_id: &'a str,
    band: &'static str,
    similarity: f64,
}

impl CandidateBatch {
    pub fn file_name(&self) -> String {
        format!("candidates_round_{}.csv", self.round)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = self
            .high_band
            .iter()
            .map(|(id, s)| (id, "high", *s))
            .chain(self.low_band.iter().map(|(id, s)| (id, "low", *s)))
            .map(|(id, band, similarity)| CandidateRow {
                post_id: id,
                band,
                similarity,
            });
        crate::model::io::write_csv(path, rows)
    }
}

fn by_similarity_then_id(a: &(String, f64), b: &(String, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Ranks every post that is neither positive nor excluded by similarity to the
/// positive centroid, takes the top `high_k`, and draws `low_k` uniformly from
/// the posts whose similarity lies in `[low_floor, min(high band))`.
pub fn select_candidates(store: &EmbeddingStore, req: &CandidateRequest) -> Result<CandidateBatch> {
    if req.positive_ids.is_empty() {
        return Err(Error::invalid("candidate selection needs at least one positive id"));
    }
    if let Some(f) = req.low_floor {
        if !(-1.0..=1.0).contains(&f) {
            return Err(Error::invalid(format!("low_floor {f} outside [-1,1]")));
        }
    }
    let center = centroid(&req.positive_ids, store)?;
    let skip: HashSet<&str> = req
        .positive_ids
        .iter()
        .chain(&req.excluded_ids)
        .map(String::as_str)
        .collect();

    let mut ranked: Vec<(String, f64)> = Vec::new();
    for (id, v) in store.iter() {
        if skip.contains(id) {
            continue;
        }
        // zero vectors have no direction and cannot be ranked
        if let Ok(s) = cosine_similarity(v, &center) {
            ranked.push((id.to_string(), s));
        }
    }
    ranked.sort_by(by_similarity_then_id);

    let sims: Vec<f64> = ranked.iter().map(|r| r.1).collect();
    let low_floor = req
        .low_floor
        .or_else(|| percentile(&sims, DEFAULT_LOW_FLOOR_PERCENTILE))
        .unwrap_or(-1.0);

    let n_high = req.high_k.min(ranked.len());
    let high_band: Vec<(String, f64)> = ranked[..n_high].to_vec();
    let ceiling = high_band.last().map(|h| h.1);
    let pool: Vec<&(String, f64)> = ranked[n_high..]
        .iter()
        .filter(|(_, s)| *s >= low_floor && ceiling.is_none_or(|c| *s < c))
        .collect();

    let n_low = req.low_k.min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut picks = rand::seq::index::sample(&mut rng, pool.len(), n_low).into_vec();
    picks.sort_unstable();
    let mut low_band: Vec<(String, f64)> = picks.into_iter().map(|i| pool[i].clone()).collect();
    low_band.sort_by(by_similarity_then_id);

    let shortfall = Shortfall {
        high: req.high_k - n_high,
        low: req.low_k - n_low,
    };
    Ok(CandidateBatch {
        high_band,
        low_band,
        round: req.round,
        low_floor,
        shortfall: (shortfall != Shortfall::default()).then_some(shortfall),
    })
}
