use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::Path;

use super::dataset::Dataset;
use super::io::{read_label_rows, LabelRow, MACHINE_CODER};
use super::types::{Annotation, Dimension, MachineLabel};
use crate::error::{Error, Result};

/// Default probability at or above which a post is labeled uncivil.
pub const DEFAULT_LABEL_THRESHOLD: f64 = 0.7;

fn parse_value(row: &LabelRow) -> Result<bool> {
    match row.value.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::invalid(format!(
            "label value `{other}` for post `{}` is not 0 or 1",
            row.post_id
        ))),
    }
}

fn parse_prob(row: &LabelRow) -> Result<Option<f64>> {
    match row.prob.as_deref().map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => {
            let p: f64 = s
                .parse()
                .map_err(|_| Error::invalid(format!("probability `{s}` is not a number")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!(
                    "probability {p} for post `{}` outside [0,1]",
                    row.post_id
                )));
            }
            Ok(Some(p))
        }
    }
}

/// Merges coder annotations and machine labels into a new revision.
///
/// Rows whose `coder_id` is [`MACHINE_CODER`] set the post's machine label;
/// a positive machine label must carry a probability of at least `threshold`
/// when a probability is given. Every other coder id is a human annotation.
pub fn attach_label_rows(dataset: &Dataset, rows: &[LabelRow], threshold: f64) -> Result<Dataset> {
    let mut posts = dataset.posts().to_vec();
    let mut machine_seen: BTreeMap<(usize, Dimension), bool> = BTreeMap::new();
    let mut human: BTreeMap<(String, Dimension, String), bool> = dataset
        .annotations()
        .iter()
        .map(|a| ((a.post_id.clone(), a.dimension, a.coder_id.clone()), a.value))
        .collect();

    for row in rows {
        let pos = dataset
            .post_position(&row.post_id)
            .ok_or_else(|| Error::DanglingReference {
                kind: "post_id",
                id: row.post_id.clone(),
            })?;
        let dim: Dimension = row.dimension.parse()?;
        let value = parse_value(row)?;
        let prob = parse_prob(row)?;
        let conflict = || Error::LabelConflict {
            post: row.post_id.clone(),
            dimension: dim.to_string(),
            coder: row.coder_id.clone(),
        };

        if row.coder_id == MACHINE_CODER {
            if value && prob.is_some_and(|p| p < threshold) {
                return Err(Error::invalid(format!(
                    "machine label 1 for post `{}` has probability below threshold {threshold}",
                    row.post_id
                )));
            }
            match machine_seen.entry((pos, dim)) {
                Entry::Occupied(e) if *e.get() != value => return Err(conflict()),
                Entry::Occupied(_) => {}
                Entry::Vacant(e) => {
                    e.insert(value);
                }
            }
            posts[pos].machine[dim] = Some(MachineLabel { value, prob });
        } else {
            match human.entry((row.post_id.clone(), dim, row.coder_id.clone())) {
                Entry::Occupied(e) if *e.get() != value => return Err(conflict()),
                Entry::Occupied(_) => {}
                Entry::Vacant(e) => {
                    e.insert(value);
                }
            }
        }
    }

    let annotations = human
        .into_iter()
        .map(|((post_id, dimension, coder_id), value)| Annotation {
            post_id,
            dimension,
            coder_id,
            value,
        })
        .collect();
    Ok(dataset.derive(None, Some(posts), Some(annotations)))
}

pub fn attach_labels(dataset: &Dataset, path: &Path, threshold: f64) -> Result<Dataset> {
    let rows = read_label_rows(path)?;
    attach_label_rows(dataset, &rows, threshold)
}

/// Revision carrying the given machine labels for one dimension.
pub fn with_machine_labels(
    dataset: &Dataset,
    dimension: Dimension,
    labels: &[(usize, MachineLabel)],
) -> Dataset {
    let mut posts = dataset.posts().to_vec();
    for &(pos, label) in labels {
        posts[pos].machine[dimension] = Some(label);
    }
    dataset.derive(None, Some(posts), None)
}

/// Rows in the `labels.csv` layout for every machine label present.
pub fn machine_label_rows(dataset: &Dataset) -> Vec<LabelRow> {
    let mut rows = Vec::new();
    for p in dataset.posts() {
        for (d, l) in p.machine.iter() {
            if let Some(l) = l {
                rows.push(LabelRow {
                    post_id: p.id.clone(),
                    dimension: d.to_string(),
                    coder_id: MACHINE_CODER.to_string(),
                    value: if l.value { "1" } else { "0" }.to_string(),
                    prob: l.prob.map(|p| format!("{p}")),
                });
            }
        }
    }
    rows
}
