//! Symmetric positive-definite banded systems via LDLᵀ.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix: `band[i][k]` is entry `(i, i-k)`.
#[derive(Debug, Clone)]
pub(crate) struct SymBanded {
    n: usize,
    width: usize,
    band: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, width: usize) -> Self {
        SymBanded {
            n,
            width,
            band: vec![vec![0.0; width + 1]; n],
        }
    }

    /// Adds `v` at `(i, j)` (and its mirror). Requires `|i-j| ≤ width`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(r - c <= self.width);
        self.band[r][r - c] += v;
    }

    pub fn factor(&self) -> Result<BandedLdl> {
        let (n, p) = (self.n, self.width);
        // l[i][k] = L(i, i-k) for k ≥ 1; d[i] = D(i)
        let mut l = vec![vec![0.0; p + 1]; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(p);
            for j in lo..i {
                let mut s = self.band[i][i - j];
                let lo_k = lo.max(j.saturating_sub(p));
                for k in lo_k..j {
                    s -= l[i][i - k] * l[j][j - k] * d[k];
                }
                l[i][i - j] = s / d[j];
            }
            let mut s = self.band[i][0];
            for k in lo..i {
                s -= l[i][i - k] * l[i][i - k] * d[k];
            }
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::invalid("banded system is not positive definite"));
            }
            d[i] = s;
        }
        Ok(BandedLdl { n, width: p, l, d })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BandedLdl {
    n: usize,
    width: usize,
    l: Vec<Vec<f64>>,
    d: Vec<f64>,
}

impl BandedLdl {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, p) = (self.n, self.width);
        for i in 0..n {
            for k in i.saturating_sub(p)..i {
                b[i] -= self.l[i][i - k] * b[k];
            }
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..(i + p + 1).min(n) {
                b[i] -= self.l[k][k - i] * b[k];
            }
        }
    }
}
