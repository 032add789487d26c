//! Schema-versioned, byte-reproducible reports.
//!
//! JSON output uses a fixed key order (struct declaration order) and a
//! fixed float format (12 significant digits, scientific notation), so a
//! given configuration and seed always produce byte-identical reports.
//! CSV output flattens the same structure into `field,value` rows with
//! alphabetically sorted paths.

use crate::error::CliError;
use crate::ingest::NormalizationRecord;
use asymlab_core::diagnostic::DiagnosticReport;
use asymlab_core::experiments::{AccuracySummary, CoverageSummary, ReplicationSummary};
use asymlab_core::inference::{CrossFitResult, DirectionDecision};
use serde::{Deserialize, Serialize};
use std::io;

/// Version of the report schema; bumped on any breaking layout change.
pub const SCHEMA_VERSION: &str = "1";

/// Echo of the resolved run configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub input: Option<String>,
    pub x_col: Option<String>,
    pub y_col: Option<String>,
    pub normalize: String,
    pub dynamics: Option<String>,
    pub alpha: f64,
    pub grid_length: usize,
    pub pad_fraction: f64,
    pub clip_floor: f64,
    pub seed: u64,
    pub replicates: Option<usize>,
    pub bootstrap: Option<usize>,
    pub knots: Option<usize>,
    pub table: Option<u8>,
    pub case: Option<String>,
    pub g: Option<String>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub n: Option<usize>,
    pub jobs: usize,
}

/// The command-specific result payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Payload {
    Estimate {
        result: CrossFitResult,
        normalization: Option<NormalizationRecord>,
    },
    Test {
        result: CrossFitResult,
        decision: DirectionDecision,
        normalization: Option<NormalizationRecord>,
    },
    Replication(ReplicationSummary),
    Coverage(CoverageSummary),
    Accuracy(AccuracySummary),
    Diagnostic(DiagnosticReport),
    Density {
        x: Vec<f64>,
        density: Vec<f64>,
    },
}

/// A complete machine-readable run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub config: ConfigEcho,
    pub payload: Payload,
    pub warnings: Vec<String>,
}

/// Fixed float rendering: 12 significant digits, scientific notation.
/// Parsing and re-rendering this form is idempotent, which makes report
/// bytes reproducible.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        "null".to_string()
    }
}

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// Serialize a report to canonical JSON bytes.
pub fn to_canonical_json(report: &Report) -> Result<String, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    report
        .serialize(&mut ser)
        .map_err(|e| CliError::Numeric(format!("report serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| CliError::Numeric(format!("non-UTF8 report: {e}")))
}

/// Parse a canonical JSON report.
pub fn from_json(text: &str) -> Result<Report, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("cannot parse report: {e}")))
}

fn flatten(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&path, v, rows);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        serde_json::Value::Number(n) => {
            let text = if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                format_f64(n.as_f64().unwrap_or(f64::NAN))
            };
            rows.push((prefix.to_string(), text));
        }
        serde_json::Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        serde_json::Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        serde_json::Value::Null => rows.push((prefix.to_string(), String::new())),
    }
}

/// Serialize a report as flattened `field,value` CSV rows (fields sorted
/// alphabetically by serde_json's map ordering).
pub fn to_csv(report: &Report) -> Result<String, CliError> {
    let value = serde_json::to_value(report)
        .map_err(|e| CliError::Numeric(format!("report serialization failed: {e}")))?;
    let mut rows = Vec::new();
    flatten("", &value, &mut rows);
    let mut out = String::from("field,value\n");
    for (k, v) in rows {
        let quoted = if v.contains(',') || v.contains('"') {
            format!("\"{}\"", v.replace('"', "\"\""))
        } else {
            v
        };
        out.push_str(&k);
        out.push(',');
        out.push_str(&quoted);
        out.push('\n');
    }
    Ok(out)
}

/// Two-column CSV for density exports.
pub fn density_csv(x: &[f64], density: &[f64]) -> String {
    let mut out = String::from("x,density\n");
    for (a, b) in x.iter().zip(density) {
        out.push_str(&format_f64(*a));
        out.push(',');
        out.push_str(&format_f64(*b));
        out.push('\n');
    }
    out
}
