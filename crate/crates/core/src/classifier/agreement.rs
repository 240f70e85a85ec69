use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub coefficient: f64,
    pub raw_agreement: f64,
    pub chance_agreement: f64,
}

/// Gwet's chance-corrected agreement between two coders.
///
/// `pairs` holds category indices `< categories`. `weights` defaults to the
/// identity (giving AC1); it must be symmetric with a unit diagonal.
pub fn gwet_agreement(
    pairs: &[(usize, usize)],
    categories: usize,
    weights: Option<&[Vec<f64>]>,
) -> Result<Agreement> {
    if pairs.len() < 2 {
        return Err(Error::invalid("agreement needs at least two rated items"));
    }
    if categories < 2 {
        return Err(Error::invalid("agreement needs at least two categories"));
    }
    let identity: Vec<Vec<f64>>;
    let w = match weights {
        Some(w) => w,
        None => {
            identity = (0..categories)
                .map(|i| (0..categories).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            &identity
        }
    };
    if w.len() != categories || w.iter().any(|r| r.len() != categories) {
        return Err(Error::invalid("weight matrix must be categories × categories"));
    }
    for i in 0..categories {
        if w[i][i] != 1.0 {
            return Err(Error::invalid("weight matrix diagonal must be 1"));
        }
        for j in 0..i {
            if w[i][j] != w[j][i] {
                return Err(Error::invalid("weight matrix must be symmetric"));
            }
        }
    }

    let n = pairs.len() as f64;
    let mut pa = 0.0;
    let mut pi = vec![0.0; categories];
    for &(a, b) in pairs {
        if a >= categories || b >= categories {
            return Err(Error::invalid(format!("category index out of range in ({a}, {b})")));
        }
        pa += w[a][b];
        pi[a] += 1.0;
        pi[b] += 1.0;
    }
    pa /= n;
    pi.iter_mut().for_each(|p| *p /= 2.0 * n);

    let q = categories as f64;
    let tw: f64 = w.iter().flatten().sum();
    let pe = tw / (q * (q - 1.0)) * pi.iter().map(|p| p * (1.0 - p)).sum::<f64>();
    if (1.0 - pe).abs() < 1e-15 {
        return Err(Error::invalid("chance agreement is 1; coefficient undefined"));
    }
    Ok(Agreement {
        coefficient: (pa - pe) / (1.0 - pe),
        raw_agreement: pa,
        chance_agreement: pe,
    })
}
