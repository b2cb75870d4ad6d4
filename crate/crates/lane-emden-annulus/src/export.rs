//! Artifact writers: CSV tables with fixed float formatting and JSON
//! sidecars. Numbers are printed with 17 significant digits so a repeated
//! run diffs byte-identically, and non-finite values become JSON nulls
//! (serde_json already does that for f64).

use crate::error::Result;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Fixed decimal-exponent rendering, 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV row from float cells.
pub fn row(cells: &[f64]) -> String {
    let mut s = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{c:.16e}");
    }
    s
}

/// Writes a CSV file with the given header line and rows.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, content)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::error::Error::Config(format!("json encoding: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// Two-column plot data, whitespace separated, for external plotting tools.
pub fn write_plot(path: &Path, pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
    let mut out = String::new();
    for (x, y) in pairs {
        let _ = writeln!(out, "{x:.16e} {y:.16e}");
    }
    write_text(path, &out)
}
