use std::collections::BTreeSet;

use serde::Serialize;

use super::hypothesis::{chi_square_test, crosstab, mann_whitney_u};
use crate::model::{Dataset, SurveyUser};

pub const CATEGORICAL_VARIABLES: [&str; 5] = ["gender", "ethnicity", "religion", "income", "education"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableTest {
    pub variable: String,
    pub test: &'static str,
    pub statistic: f64,
    pub p: f64,
    pub reject_at_5pct: bool,
    pub n_full: usize,
    pub n_subsample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representativeness {
    pub n_full: usize,
    pub n_subsample: usize,
    pub tests: Vec<VariableTest>,
    /// Variables that could not be tested (missing or single-valued).
    pub untestable: Vec<String>,
}

/// Compares the survey users who follow at least one influencer against the
/// whole survey panel: Pearson chi-square per categorical variable and
/// Mann–Whitney U for age and ideology.
pub fn representativeness(dataset: &Dataset) -> Representativeness {
    let influencers: BTreeSet<&str> = dataset.influencers().map(|a| a.id.as_str()).collect();
    let followers: BTreeSet<&str> = dataset
        .follows()
        .iter()
        .filter(|e| influencers.contains(e.followee_id.as_str()))
        .map(|e| e.follower_id.as_str())
        .collect();
    let full: Vec<&SurveyUser> = dataset.survey_users().iter().collect();
    let sub: Vec<&SurveyUser> = full
        .iter()
        .copied()
        .filter(|s| followers.contains(s.id.as_str()))
        .collect();

    let mut tests = Vec::new();
    let mut untestable = Vec::new();
    for var in CATEGORICAL_VARIABLES {
        let pairs = full
            .iter()
            .filter_map(|s| s.category(var).map(|c| ("full".to_string(), c)))
            .chain(sub.iter().filter_map(|s| s.category(var).map(|c| ("subsample".to_string(), c))));
        let rows = ["full".to_string(), "subsample".to_string()];
        let table = crosstab(pairs, Some(&rows), None);
        match chi_square_test(&table) {
            Ok(t) => tests.push(VariableTest {
                variable: var.to_string(),
                test: "pearson_chi_square",
                statistic: t.statistic,
                p: t.p,
                reject_at_5pct: t.p < 0.05,
                n_full: table.row_totals()[0] as usize,
                n_subsample: table.row_totals()[1] as usize,
            }),
            Err(_) => untestable.push(var.to_string()),
        }
    }

    let numeric: [(&str, fn(&SurveyUser) -> Option<f64>); 2] = [
        ("age", |s| s.age()),
        ("ideology", |s| s.ideology.map(|v| v as f64)),
    ];
    for (var, get) in numeric {
        let a: Vec<f64> = full.iter().filter_map(|s| get(s)).collect();
        let b: Vec<f64> = sub.iter().filter_map(|s| get(s)).collect();
        match mann_whitney_u(&a, &b) {
            Ok(t) => tests.push(VariableTest {
                variable: var.to_string(),
                test: "mann_whitney_u",
                statistic: t.u,
                p: t.p,
                reject_at_5pct: t.p < 0.05,
                n_full: a.len(),
                n_subsample: b.len(),
            }),
            Err(_) => untestable.push(var.to_string()),
        }
    }
    Representativeness {
        n_full: full.len(),
        n_subsample: sub.len(),
        tests,
        untestable,
    }
}
