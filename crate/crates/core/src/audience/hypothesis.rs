//! Contingency-table tests (G-test, Pearson chi-square) and the
//! Mann–Whitney U test.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<String>, cols: Vec<String>, cells: Vec<Vec<u64>>) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::invalid("contingency cells do not match labels"));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    pub fn from_cells(cells: Vec<Vec<u64>>) -> Result<Self> {
        let rows = (0..cells.len()).map(|i| format!("r{i}")).collect();
        let cols = (0..cells.first().map_or(0, Vec::len)).map(|j| format!("c{j}")).collect();
        Self::new(rows, cols, cells)
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols.len())
            .map(|j| self.cells.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// At least a 2×2 table with a positive total after dropping empty margins.
    pub fn is_testable(&self) -> bool {
        let t = self.trimmed();
        t.rows.len() >= 2 && t.cols.len() >= 2 && t.total() > 0
    }

    /// Copy without all-zero rows and columns.
    pub fn trimmed(&self) -> ContingencyTable {
        let rt = self.row_totals();
        let ct = self.col_totals();
        let keep_r: Vec<usize> = (0..rt.len()).filter(|&i| rt[i] > 0).collect();
        let keep_c: Vec<usize> = (0..ct.len()).filter(|&j| ct[j] > 0).collect();
        ContingencyTable {
            rows: keep_r.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: keep_c.iter().map(|&j| self.cols[j].clone()).collect(),
            cells: keep_r
                .iter()
                .map(|&i| keep_c.iter().map(|&j| self.cells[i][j]).collect())
                .collect(),
        }
    }
}

/// Counts `(row, column)` pairs. `row_order`/`col_order` fix label order and
/// keep empty rows or columns; otherwise labels appear sorted.
pub fn crosstab<I, R, C>(pairs: I, row_order: Option<&[String]>, col_order: Option<&[String]>) -> ContingencyTable
where
    I: IntoIterator<Item = (R, C)>,
    R: Into<String>,
    C: Into<String>,
{
    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut rs: Vec<String> = row_order.map(|r| r.to_vec()).unwrap_or_default();
    let mut cs: Vec<String> = col_order.map(|c| c.to_vec()).unwrap_or_default();
    for (r, c) in pairs {
        let (r, c) = (r.into(), c.into());
        let r = if r.is_empty() { "unlabeled".to_string() } else { r };
        if row_order.is_none() && !rs.contains(&r) {
            rs.push(r.clone());
        }
        if col_order.is_none() && !cs.contains(&c) {
            cs.push(c.clone());
        }
        *counts.entry((r, c)).or_default() += 1;
    }
    if row_order.is_none() {
        rs.sort();
    }
    if col_order.is_none() {
        cs.sort();
    }
    let cells = rs
        .iter()
        .map(|r| {
            cs.iter()
                .map(|c| counts.get(&(r.clone(), c.clone())).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    ContingencyTable {
        rows: rs,
        cols: cs,
        cells,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableTest {
    pub statistic: f64,
    pub df: usize,
    pub p: f64,
    /// Labels of all-zero rows and columns removed before testing.
    pub dropped: Vec<String>,
}

/// Upper tail `P(χ²_df > x)` through the regularized incomplete gamma function.
pub fn chi_square_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, x / 2.0)
}

fn expected_and_prepare(table: &ContingencyTable) -> Result<(ContingencyTable, Vec<Vec<f64>>, Vec<String>)> {
    let trimmed = table.trimmed();
    let dropped: Vec<String> = table
        .rows
        .iter()
        .filter(|r| !trimmed.rows.contains(r))
        .chain(table.cols.iter().filter(|c| !trimmed.cols.contains(c)))
        .cloned()
        .collect();
    if trimmed.rows.len() < 2 || trimmed.cols.len() < 2 {
        return Err(Error::invalid(
            "table needs at least two non-empty rows and columns",
        ));
    }
    let n = trimmed.total() as f64;
    let rt = trimmed.row_totals();
    let ct = trimmed.col_totals();
    let expected = rt
        .iter()
        .map(|&r| ct.iter().map(|&c| r as f64 * c as f64 / n).collect())
        .collect();
    Ok((trimmed, expected, dropped))
}

/// `G = 2 Σ O ln(O/E)` over cells with `O > 0`.
pub fn g_test(table: &ContingencyTable) -> Result<TableTest> {
    let (t, e, dropped) = expected_and_prepare(table)?;
    let mut g = 0.0;
    for (orow, erow) in t.cells.iter().zip(&e) {
        for (&o, &ex) in orow.iter().zip(erow) {
            if o > 0 {
                g += o as f64 * (o as f64 / ex).ln();
            }
        }
    }
    let g = (2.0 * g).max(0.0);
    let df = (t.rows.len() - 1) * (t.cols.len() - 1);
    Ok(TableTest {
        statistic: g,
        df,
        p: chi_square_sf(g, df),
        dropped,
    })
}

/// Pearson `Σ (O − E)² / E`.
pub fn chi_square_test(table: &ContingencyTable) -> Result<TableTest> {
    let (t, e, dropped) = expected_and_prepare(table)?;
    let mut stat = 0.0;
    for (orow, erow) in t.cells.iter().zip(&e) {
        for (&o, &ex) in orow.iter().zip(erow) {
            let d = o as f64 - ex;
            stat += d * d / ex;
        }
    }
    let df = (t.rows.len() - 1) * (t.cols.len() - 1);
    Ok(TableTest {
        statistic: stat,
        df,
        p: chi_square_sf(stat, df),
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitney {
    /// `U` for the first sample.
    pub u: f64,
    pub z: f64,
    pub p: f64,
}

/// Mid-rank Mann–Whitney U with the tie-corrected normal approximation
/// (no continuity correction), two-sided.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("Mann–Whitney needs two nonempty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN observation"));
    }
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));
    let n = all.len();
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += all[i..=j].iter().filter(|x| x.1).count() as f64 * mid;
        i = j + 1;
    }
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let nf = n as f64;
    let var = n1 * n2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if !(var > 0.0) {
        return Ok(MannWhitney { u, z: 0.0, p: 1.0 });
    }
    let z = (u - n1 * n2 / 2.0) / var.sqrt();
    Ok(MannWhitney {
        u,
        z,
        p: erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0),
    })
}
