use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// `|a ∩ b| / |a ∪ b|`, and 1 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Rank-based split into `k` groups numbered `1..=k`, lowest values first,
/// ties broken by id. Group sizes differ by at most one.
pub fn quantile_groups<S: AsRef<str>>(records: &[(S, f64)], k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("quantile grouping needs k ≥ 2"));
    }
    if records.len() < k {
        return Err(Error::invalid(format!(
            "{} records cannot fill {k} groups",
            records.len()
        )));
    }
    let n = records.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        records[i]
            .1
            .total_cmp(&records[j].1)
            .then_with(|| records[i].0.as_ref().cmp(records[j].0.as_ref()))
    });
    let mut group = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        group[i] = rank * k / n + 1;
    }
    Ok(group)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jaccard_cases() {
        let s = |v: &[u32]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(jaccard(&s(&[1, 2, 3]), &s(&[1, 2, 3])), 1.0);
        assert_eq!(jaccard(&s(&[1, 2]), &s(&[3, 4])), 0.0);
        assert_eq!(jaccard(&s(&[1, 2, 3]), &s(&[2, 3, 4])), 0.5);
        assert_eq!(jaccard(&s(&[]), &s(&[])), 1.0);
    }

    #[test]
    fn eight_records_four_groups() {
        let recs: Vec<(String, f64)> = (0..8).map(|i| (format!("a{i}"), (7 - i) as f64)).collect();
        let g = quantile_groups(&recs, 4).unwrap();
        assert_eq!(g, vec![4, 4, 3, 3, 2, 2, 1, 1]);
    }

    #[test]
    fn ties_split_by_id() {
        let recs: Vec<(String, f64)> = ["d", "b", "a", "c"].iter().map(|s| (s.to_string(), 0.5)).collect();
        assert_eq!(quantile_groups(&recs, 2).unwrap(), vec![2, 1, 1, 2]);
        assert!(quantile_groups(&recs, 5).is_err());
    }
}
