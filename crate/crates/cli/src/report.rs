use std::fmt::Write as _;

use ndv_scout_core::dict::DictInversionResult;
use ndv_scout_core::distribution::{DistributionClass, DistributionReport};
use ndv_scout_core::estimator::{BatchMemoryEstimate, BoundKind, Diagnostics, Method, NoEstimate};
use ndv_scout_core::ingest::{LogicalKind, PhysicalType, StatsCompleteness};
use ndv_scout_core::minmax::MinMaxDiversityResult;
use ndv_scout_core::{ColumnReport, Warning};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub files: Vec<FileReport>,
    pub errors: Vec<FileError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileError {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileReport {
    pub path: String,
    pub file_rows: u64,
    pub row_groups: usize,
    pub footer_bytes: u64,
    pub columns: Vec<ColumnEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnEntry {
    pub column: String,
    pub physical_type: PhysicalType,
    pub logical_type: LogicalKind,
    pub total_rows: u64,
    pub null_rows: u64,
    pub ndv_final: Option<u64>,
    pub no_estimate_reason: Option<NoEstimate>,
    pub ndv_dict: Option<f64>,
    pub ndv_minmax: Option<f64>,
    pub winner: Option<Method>,
    pub applied_bounds: Vec<BoundKind>,
    pub is_lower_bound: bool,
    pub distribution: DistributionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub batch_memory: Option<BatchMemoryEstimate>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub explain: Option<Explain>,
}

/// Per-method evidence, included with `--explain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explain {
    pub dictionary: Option<DictInversionResult>,
    pub minmax: Option<MinMaxDiversityResult>,
    pub diagnostics: Option<Diagnostics>,
    pub stats_completeness: StatsCompleteness,
}

impl ColumnEntry {
    pub fn from_report(r: ColumnReport, explain: bool) -> Self {
        let est = r.estimate.as_ref();
        Self {
            column: r.column_name.clone(),
            physical_type: r.column_type.physical,
            logical_type: r.column_type.logical,
            total_rows: r.total_rows,
            null_rows: r.null_rows,
            ndv_final: est.map(|e| e.ndv_final),
            no_estimate_reason: r.no_estimate_reason,
            ndv_dict: r.dictionary.as_ref().map(|d| d.ndv_dict),
            ndv_minmax: r.minmax.as_ref().map(|m| m.ndv_minmax),
            winner: est.map(|e| e.winner),
            applied_bounds: est.map(|e| e.applied_bounds.clone()).unwrap_or_default(),
            is_lower_bound: est.is_some_and(|e| e.is_lower_bound),
            distribution: r.distribution.clone(),
            batch_memory: r.batch_memory,
            warnings: r.warnings.clone(),
            explain: explain.then(|| Explain {
                diagnostics: r.estimate.map(|e| e.diagnostics),
                dictionary: r.dictionary,
                minmax: r.minmax,
                stats_completeness: r.stats_completeness,
            }),
        }
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.1}"))
}

fn class_label(c: DistributionClass, analyzable: bool) -> String {
    if analyzable {
        c.to_string()
    } else {
        format!("{c}?")
    }
}

fn warning_code(w: &Warning) -> &'static str {
    match w {
        Warning::LowerBound => "lower_bound",
        Warning::PlainFallback => "plain_fallback",
        Warning::Unanalyzable { .. } => "unanalyzable",
        Warning::DictionaryUnavailable { .. } => "no_dict",
        Warning::MinMaxUnavailable { .. } => "no_minmax",
        Warning::ChunksNotInvertible { .. } => "chunks_not_invertible",
        Warning::SolverNotConverged => "not_converged",
        Warning::EstimatedLength { .. } => "estimated_len",
        Warning::BatchModelNotApplicable => "batch_na",
        Warning::IncompleteNullCounts => "incomplete_nulls",
    }
}

/// Human-readable summary; diagnostics are truncated to short codes.
pub fn render_table(report: &Report) -> String {
    let mut rows = vec![[
        "file".to_string(),
        "column".into(),
        "ndv".into(),
        "dict".into(),
        "minmax".into(),
        "class".into(),
        "bounds".into(),
        "batch_mem_bytes".into(),
        "warnings".into(),
    ]];
    for f in &report.files {
        for c in &f.columns {
            rows.push([
                f.path.clone(),
                c.column.clone(),
                c.ndv_final.map_or_else(
                    || c.no_estimate_reason.map_or("-".into(), |r| format!("none ({})", serde_plain(&r))),
                    |n| if c.is_lower_bound { format!(">={n}") } else { n.to_string() },
                ),
                opt_num(c.ndv_dict),
                opt_num(c.ndv_minmax),
                class_label(c.distribution.class, c.distribution.analyzable),
                c.applied_bounds.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
                c.batch_memory.map_or("-".into(), |m| {
                    format!("{:.0}{}", m.dict_total_bytes, if m.applicable { "" } else { " (n/a)" })
                }),
                c.warnings.iter().map(warning_code).collect::<Vec<_>>().join(","),
            ]);
        }
    }
    let widths: Vec<usize> = (0..rows[0].len()).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    for e in &report.errors {
        let _ = writeln!(out, "error: {}: {}", e.path, e.error);
    }
    out
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}
