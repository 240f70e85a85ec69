//! Plain-text model files.
//!
//! ```text
//! civiscope-logistic v1
//! dim 3
//! l2 0.001
//! seed 7
//! bias -0.25
//! weights 0.5 1.25 -3
//! ```
//!
//! Ensembles start with `civiscope-ensemble v1` and `members B`, followed by
//! `B` logistic blocks. Numbers use shortest round-trip decimal form.

use std::fmt::Write as _;
use std::path::Path;

use super::{Classifier, EnsembleModel, LogisticModel};
use crate::error::{Error, Result};

const LOGISTIC_MAGIC: &str = "civiscope-logistic v1";
const ENSEMBLE_MAGIC: &str = "civiscope-ensemble v1";

fn write_logistic(out: &mut String, m: &LogisticModel) {
    let _ = writeln!(out, "{LOGISTIC_MAGIC}");
    let _ = writeln!(out, "dim {}", m.dim());
    let _ = writeln!(out, "l2 {}", m.l2);
    let _ = writeln!(out, "seed {}", m.seed);
    let _ = writeln!(out, "bias {}", m.bias);
    let ws: Vec<String> = m.weights.iter().map(|w| w.to_string()).collect();
    let _ = writeln!(out, "weights {}", ws.join(" "));
}

pub fn to_text(model: &Classifier) -> String {
    let mut out = String::new();
    match model {
        Classifier::Single(m) => write_logistic(&mut out, m),
        Classifier::Ensemble(e) => {
            let _ = writeln!(out, "{ENSEMBLE_MAGIC}");
            let _ = writeln!(out, "members {}", e.members.len());
            for m in &e.members {
                write_logistic(&mut out, m);
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            if !l.trim().is_empty() {
                return Ok((i + 1, l.trim()));
            }
        }
        Err(Error::invalid("model file ends early"))
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let (line, l) = self.next()?;
        l.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' ').or(rest.is_empty().then_some("")))
            .ok_or_else(|| Error::invalid(format!("model file line {line}: expected `{key}`")))
    }
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("model file: bad {what} `{s}`")))
}

fn read_logistic(lines: &mut Lines<'_>) -> Result<LogisticModel> {
    let (line, magic) = lines.next()?;
    if magic != LOGISTIC_MAGIC {
        return Err(Error::invalid(format!("model file line {line}: expected `{LOGISTIC_MAGIC}`")));
    }
    let dim: usize = num(lines.field("dim")?, "dim")?;
    let l2: f64 = num(lines.field("l2")?, "l2")?;
    let seed: u64 = num(lines.field("seed")?, "seed")?;
    let bias: f64 = num(lines.field("bias")?, "bias")?;
    let weights = lines
        .field("weights")?
        .split_whitespace()
        .map(|w| num::<f64>(w, "weight"))
        .collect::<Result<Vec<_>>>()?;
    if weights.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: weights.len(),
            id: "<model weights>".into(),
        });
    }
    if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("model file contains non-finite weights"));
    }
    Ok(LogisticModel {
        weights,
        bias,
        l2,
        seed,
        iterations: 0,
        final_loss: f64::NAN,
        converged: true,
    })
}

pub fn from_text(text: &str) -> Result<Classifier> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let first = text.lines().find(|l| !l.trim().is_empty()).map(str::trim);
    match first {
        Some(LOGISTIC_MAGIC) => Ok(Classifier::Single(read_logistic(&mut lines)?)),
        Some(ENSEMBLE_MAGIC) => {
            lines.next()?;
            let b: usize = num(lines.field("members")?, "member count")?;
            if b == 0 {
                return Err(Error::invalid("ensemble model with zero members"));
            }
            let members = (0..b)
                .map(|_| read_logistic(&mut lines))
                .collect::<Result<Vec<_>>>()?;
            let dim = members[0].dim();
            if members.iter().any(|m| m.dim() != dim) {
                return Err(Error::invalid("ensemble members disagree on dimension"));
            }
            Ok(Classifier::Ensemble(EnsembleModel { members }))
        }
        _ => Err(Error::invalid("unrecognised model file header")),
    }
}

pub fn save(model: &Classifier, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(model)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn load(path: &Path) -> Result<Classifier> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    from_text(&text)
}
