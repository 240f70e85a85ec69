use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

/// First two characters followed by `**`.
pub fn mask_handle(handle: &str) -> String {
    let head: String = handle.chars().take(2).collect();
    format!("{head}**")
}

/// Applies the privacy flag to every account handle or id written out.
#[derive(Debug, Clone, Copy)]
pub struct Masker {
    pub enabled: bool,
}

impl Masker {
    pub fn apply(&self, s: &str) -> String {
        if self.enabled {
            mask_handle(s)
        } else {
            s.to_string()
        }
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(path.to_path_buf())
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<PathBuf> {
    crate::model::io::write_csv(path, rows)?;
    Ok(path.to_path_buf())
}

/// Daily counts as dots with two fitted curves and outlier days circled.
pub fn series_svg(
    title: &str,
    dates: &[NaiveDate],
    counts: &[u64],
    curves: &[(&str, &str, &[f64])],
    outliers: &[usize],
) -> String {
    const W: f64 = 800.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let n = counts.len().max(2);
    let ymax = counts
        .iter()
        .map(|&c| c as f64)
        .chain(curves.iter().flat_map(|c| c.2.iter().copied()))
        .fold(1.0f64, f64::max);
    let px = |i: usize| PAD + (W - 2.0 * PAD) * i as f64 / (n - 1) as f64;
    let py = |v: f64| H - PAD - (H - 2.0 * PAD) * v.max(0.0) / ymax;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="20" font-family="sans-serif" font-size="14">{title}</text>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{y}" x2="{x}" y2="{y}" stroke="black"/>"#,
        y = H - PAD,
        x = W - PAD
    );
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y}" stroke="black"/>"#, y = H - PAD);
    let _ = writeln!(
        s,
        r#"<text x="4" y="{PAD}" font-family="sans-serif" font-size="10">{ymax:.0}</text>"#
    );
    if let (Some(first), Some(last)) = (dates.first(), dates.last()) {
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{y}" font-family="sans-serif" font-size="10">{first}</text>"#,
            y = H - PAD + 15.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="10" text-anchor="end">{last}</text>"#,
            x = W - PAD,
            y = H - PAD + 15.0
        );
    }
    for (i, &c) in counts.iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2" fill="#555"/>"##,
            px(i),
            py(c as f64)
        );
    }
    for &i in outliers {
        if i < counts.len() {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="none" stroke="red"/>"#,
                px(i),
                py(counts[i] as f64)
            );
        }
    }
    for (k, (label, color, ys)) in curves.iter().enumerate() {
        let pts: Vec<String> = ys
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", px(i), py(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" fill="{color}" text-anchor="end">{label}</text>"#,
            x = W - PAD,
            y = 20.0 + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
