use std::collections::HashMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Dataset, Dimension, LabelSource};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DailySeries {
    pub dimension: Dimension,
    pub dates: Vec<NaiveDate>,
    pub counts: Vec<u64>,
}

impl DailySeries {
    pub fn values(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Uncivil posts per UTC day across the study window, zero-filled.
pub fn build_daily_series(dataset: &Dataset, dimension: Dimension, source: LabelSource) -> Result<DailySeries> {
    let dates = dataset.window().days();
    if dates.is_empty() {
        return Err(Error::invalid("study window contains no days"));
    }
    let slot: HashMap<NaiveDate, usize> = dates.iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let mut counts = vec![0u64; dates.len()];
    for (i, p) in dataset.posts().iter().enumerate() {
        if dataset.is_uncivil(i, dimension, source) {
            if let Some(&s) = slot.get(&p.day()) {
                counts[s] += 1;
            }
        }
    }
    Ok(DailySeries {
        dimension,
        dates,
        counts,
    })
}
