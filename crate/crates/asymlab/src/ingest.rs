//! CSV ingestion and min-max normalization.
//!
//! Dialect: comma-separated, UTF-8, "." decimal, optional header row.
//! Column selectors are either 0-based indices or header names; when a
//! name is used, the first row is treated as the header. Rows with missing
//! or non-numeric entries are dropped and counted in the warnings.

use crate::error::CliError;
use asymlab_core::inference::PairedSample;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A parsed sample plus human-readable ingestion warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestResult {
    pub sample: PairedSample,
    pub warnings: Vec<String>,
}

/// Affine min-max normalization record; Ĉ is not affine-invariant, so the
/// induced shift is reported alongside any normalized estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub x_min: f64,
    pub x_range: f64,
    pub y_min: f64,
    pub y_range: f64,
    /// Amount added to Ĉ by the normalization: ln(y_range) − ln(x_range).
    pub c_shift: f64,
}

enum Selector {
    Index(usize),
    Name(String),
}

fn selector(spec: Option<&str>, default_index: usize) -> Selector {
    match spec {
        None => Selector::Index(default_index),
        Some(s) => match s.parse::<usize>() {
            Ok(i) => Selector::Index(i),
            Err(_) => Selector::Name(s.to_string()),
        },
    }
}

fn resolve(
    sel: &Selector,
    header: &csv::StringRecord,
    has_header: bool,
) -> Result<usize, CliError> {
    match sel {
        Selector::Index(i) => Ok(*i),
        Selector::Name(name) => {
            if !has_header {
                return Err(CliError::Input(format!(
                    "column '{name}' requested but the file has no header row"
                )));
            }
            header
                .iter()
                .position(|f| f.trim() == name)
                .ok_or_else(|| CliError::Input(format!("column '{name}' not found in header")))
        }
    }
}

/// Read paired columns from a CSV file.
pub fn ingest_csv(
    path: &Path,
    x_col: Option<&str>,
    y_col: Option<&str>,
) -> Result<IngestResult, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("malformed CSV in {}: {e}", path.display())))?;
    if records.is_empty() {
        return Err(CliError::Input(format!("{} is empty", path.display())));
    }

    let x_sel = selector(x_col, 0);
    let y_sel = selector(y_col, 1);
    // A header exists when a named column was requested, or when the first
    // row's selected fields do not parse as numbers.
    let named = matches!(x_sel, Selector::Name(_)) || matches!(y_sel, Selector::Name(_));
    let first = &records[0];
    let numeric_first = |i: usize| first.get(i).map_or(false, |f| f.trim().parse::<f64>().is_ok());
    let has_header = named
        || match (&x_sel, &y_sel) {
            (Selector::Index(i), Selector::Index(j)) => !(numeric_first(*i) && numeric_first(*j)),
            _ => true,
        };
    let ix = resolve(&x_sel, first, has_header)?;
    let iy = resolve(&y_sel, first, has_header)?;

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut dropped = 0usize;
    for rec in records.iter().skip(has_header as usize) {
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|f| f.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
        };
        match (parse(ix), parse(iy)) {
            (Some(a), Some(b)) => {
                x.push(a);
                y.push(b);
            }
            _ => dropped += 1,
        }
    }
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(format!(
            "{dropped} row{} dropped (missing or non-numeric entries)",
            if dropped == 1 { "" } else { "s" }
        ));
    }
    let sample = PairedSample::new(x, y).map_err(CliError::from)?;
    if sample.truncated {
        warnings.push("odd row count; last row dropped to even the sample".into());
    }
    Ok(IngestResult { sample, warnings })
}

/// Read a single column from a CSV file (for density export).
pub fn ingest_column(path: &Path, col: Option<&str>) -> Result<(Vec<f64>, Vec<String>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("malformed CSV in {}: {e}", path.display())))?;
    if records.is_empty() {
        return Err(CliError::Input(format!("{} is empty", path.display())));
    }
    let sel = selector(col, 0);
    let first = &records[0];
    let has_header = match &sel {
        Selector::Name(_) => true,
        Selector::Index(i) => !first.get(*i).map_or(false, |f| f.trim().parse::<f64>().is_ok()),
    };
    let idx = resolve(&sel, first, has_header)?;
    let mut values = Vec::new();
    let mut dropped = 0usize;
    for rec in records.iter().skip(has_header as usize) {
        match rec
            .get(idx)
            .and_then(|f| f.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite())
        {
            Some(v) => values.push(v),
            None => dropped += 1,
        }
    }
    let mut warnings = Vec::new();
    if dropped > 0 {
        warnings.push(format!(
            "{dropped} row{} dropped (missing or non-numeric entries)",
            if dropped == 1 { "" } else { "s" }
        ));
    }
    if values.len() < 8 {
        return Err(CliError::Input(format!(
            "need at least 8 usable rows, got {}",
            values.len()
        )));
    }
    Ok((values, warnings))
}

/// Write a paired sample as a two-column CSV with an `x,y` header.
pub fn write_pairs_csv(path: &Path, sample: &PairedSample) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    writer
        .write_record(["x", "y"])
        .and_then(|_| {
            for (a, b) in sample.x.iter().zip(&sample.y) {
                writer.write_record([format!("{a:?}"), format!("{b:?}")])?;
            }
            writer.flush().map_err(csv::Error::from)
        })
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Map both coordinates affinely onto [0, 1].
pub fn normalize_minmax(sample: &PairedSample) -> Result<(PairedSample, NormalizationRecord), CliError> {
    let range_of = |v: &[f64]| -> Result<(f64, f64), CliError> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            return Err(CliError::Input("zero data range; cannot normalize".into()));
        }
        Ok((lo, hi - lo))
    };
    let (x_min, x_range) = range_of(&sample.x)?;
    let (y_min, y_range) = range_of(&sample.y)?;
    let x: Vec<f64> = sample.x.iter().map(|&v| (v - x_min) / x_range).collect();
    let y: Vec<f64> = sample.y.iter().map(|&v| (v - y_min) / y_range).collect();
    let record = NormalizationRecord {
        x_min,
        x_range,
        y_min,
        y_range,
        // H(aX) = H(X) + ln a with a = 1/range, so normalization subtracts
        // ln(x_range) from Ĥ(X) and ln(y_range) from Ĥ(Y).
        c_shift: y_range.ln() - x_range.ln(),
    };
    let normalized = PairedSample {
        n_total: sample.n_total,
        truncated: sample.truncated,
        x,
        y,
    };
    Ok((normalized, record))
}
