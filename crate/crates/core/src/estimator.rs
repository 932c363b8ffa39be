//! Final NDV estimate and batch dictionary memory.
//!
//! Both estimators tend to undershoot (dictionary inversion on sorted data,
//! min/max diversity on well-spread data), so the larger one is kept and then
//! capped by every hard bound the metadata supports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dict::DictInversionResult;
use crate::distribution::{DistributionClass, DistributionReport};
use crate::ingest::{decode_integer, ColumnProfile, LogicalKind, PhysicalType};
use crate::minmax::MinMaxDiversityResult;

/// Cardinality bound for columns whose observed values are all one byte.
pub const SINGLE_BYTE_ASCII_BOUND: u64 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub single_byte_bound: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { single_byte_bound: SINGLE_BYTE_ASCII_BOUND }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema bound for column {column:?} must be at least 1")]
pub struct InvalidConstraint {
    pub column: String,
}

/// Externally known per-column NDV upper bounds, such as the row count of the
/// table a foreign key references.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaConstraints {
    bounds: BTreeMap<String, u64>,
}

impl SchemaConstraints {
    pub fn new(bounds: BTreeMap<String, u64>) -> Result<Self, InvalidConstraint> {
        if let Some((column, _)) = bounds.iter().find(|(_, b)| **b == 0) {
            return Err(InvalidConstraint { column: column.clone() });
        }
        Ok(Self { bounds })
    }

    pub fn get(&self, column: &str) -> Option<u64> {
        self.bounds.get(column).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    NonNullRows,
    IntegerRange,
    SingleByteAscii,
    SchemaConstraint,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::NonNullRows => "non_null_rows",
            BoundKind::IntegerRange => "integer_range",
            BoundKind::SingleByteAscii => "single_byte_ascii",
            BoundKind::SchemaConstraint => "schema_constraint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeBound {
    pub kind: BoundKind,
    pub value: u64,
}

/// Cardinality implied by the column type and its global extrema.
///
/// Integers and dates admit at most `max - min + 1` values. Strings and
/// binary whose every observed extremum is a single byte are assumed to be
/// single-character codes.
pub fn type_upper_bound(profile: &ColumnProfile, config: &EstimatorConfig) -> Option<TypeBound> {
    let ty = profile.column_type;
    match ty.logical {
        LogicalKind::Integer | LogicalKind::Date
            if matches!(ty.physical, PhysicalType::Int32 | PhysicalType::Int64) =>
        {
            let (lo, hi) = profile.global_extrema()?;
            let lo = decode_integer(lo.as_bytes(), ty)?;
            let hi = decode_integer(hi.as_bytes(), ty)?;
            let width = u64::try_from(hi - lo + 1).unwrap_or(u64::MAX);
            Some(TypeBound { kind: BoundKind::IntegerRange, value: width.max(1) })
        }
        LogicalKind::String | LogicalKind::Binary => {
            let mut ranged = profile.ranged_chunks().peekable();
            ranged.peek()?;
            let single_byte = ranged.filter_map(|c| c.range()).all(|(lo, hi)| lo.byte_len() == 1 && hi.byte_len() == 1);
            single_byte.then_some(TypeBound { kind: BoundKind::SingleByteAscii, value: config.single_byte_bound })
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dictionary,
    MinMax,
}

/// Per-method evidence behind an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mean_len_bytes: Option<f64>,
    pub distinct_extrema: Option<usize>,
    pub m_min: Option<usize>,
    pub m_max: Option<usize>,
    pub n_groups: Option<usize>,
    pub overlap_ratio: Option<f64>,
    pub monotonicity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdvEstimate {
    pub column_name: String,
    pub ndv_final: u64,
    pub ndv_dict: Option<f64>,
    pub ndv_minmax: Option<f64>,
    pub winner: Method,
    pub applied_bounds: Vec<BoundKind>,
    pub distribution_class: DistributionClass,
    /// The winning method is known to undershoot: plain-encoded chunks for
    /// the dictionary side, saturation for the min/max side.
    pub is_lower_bound: bool,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(rename_all = "snake_case")]
pub enum NoEstimate {
    #[error("neither dictionary nor min/max evidence is available")]
    NoSignals,
    #[error("column has no non-null values")]
    AllNull,
}

/// Max-combine the available estimates and apply every hard bound.
pub fn combine(
    dict: Option<&DictInversionResult>,
    minmax: Option<&MinMaxDiversityResult>,
    profile: &ColumnProfile,
    report: &DistributionReport,
    constraints: &SchemaConstraints,
    config: &EstimatorConfig,
) -> Result<NdvEstimate, NoEstimate> {
    let non_null = profile.non_null_values();
    if non_null == 0 {
        return Err(NoEstimate::AllNull);
    }
    let (candidate, winner, is_lower_bound) = match (dict, minmax) {
        (None, None) => return Err(NoEstimate::NoSignals),
        (Some(d), Some(m)) if m.ndv_minmax > d.ndv_dict => (m.ndv_minmax, Method::MinMax, m.saturated),
        (Some(d), _) => (d.ndv_dict, Method::Dictionary, d.plain_fallback),
        (None, Some(m)) => (m.ndv_minmax, Method::MinMax, m.saturated),
    };

    let mut bounds = vec![(BoundKind::NonNullRows, non_null)];
    if let Some(b) = type_upper_bound(profile, config) {
        bounds.push((b.kind, b.value));
    }
    if let Some(b) = constraints.get(&profile.column_name) {
        bounds.push((BoundKind::SchemaConstraint, b));
    }
    let tightest = bounds.iter().map(|(_, v)| *v).min().expect("non-null bound always present");
    let unbounded = candidate.round().max(1.0);
    let (ndv_final, applied_bounds) = if (tightest as f64) < unbounded {
        let applied = bounds.iter().filter(|(_, v)| *v == tightest).map(|(k, _)| *k).collect();
        (tightest.max(1), applied)
    } else {
        (unbounded as u64, Vec::new())
    };

    let diagnostics = Diagnostics {
        mean_len_bytes: dict.map(|d| d.mean_len_bytes),
        distinct_extrema: minmax.map(|m| m.distinct_extrema),
        m_min: minmax.map(|m| m.m_min),
        m_max: minmax.map(|m| m.m_max),
        n_groups: minmax.map(|m| m.n_groups),
        overlap_ratio: report.analyzable.then_some(report.overlap_ratio),
        monotonicity: report.analyzable.then_some(report.monotonicity),
    };
    Ok(NdvEstimate {
        column_name: profile.column_name.clone(),
        ndv_final,
        ndv_dict: dict.map(|d| d.ndv_dict),
        ndv_minmax: minmax.map(|m| m.ndv_minmax),
        winner,
        applied_bounds,
        distribution_class: report.class,
        is_lower_bound,
        diagnostics,
    })
}

/// Expected dictionary bytes for one batch of `batch_bytes` raw value bytes.
pub fn batch_dictionary_size(ndv: f64, len: f64, batch_bytes: f64) -> f64 {
    let global = ndv * len;
    if global <= 0.0 {
        return 0.0;
    }
    -global * (-batch_bytes / global).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchMemoryEstimate {
    pub batch_bytes: f64,
    pub dict_global_bytes: f64,
    pub dict_batch_bytes: f64,
    pub n_batches: f64,
    pub dict_total_bytes: f64,
    /// False for ordered layouts, where batches see disjoint value slices and
    /// the uniform-draw model does not hold.
    pub applicable: bool,
}

pub fn total_batch_memory(
    ndv: f64,
    len: f64,
    values: u64,
    nulls: u64,
    batch_bytes: f64,
    class: DistributionClass,
) -> BatchMemoryEstimate {
    let n_batches = values.saturating_sub(nulls) as f64 * len / batch_bytes;
    let dict_batch = batch_dictionary_size(ndv, len, batch_bytes);
    BatchMemoryEstimate {
        batch_bytes,
        dict_global_bytes: ndv * len,
        dict_batch_bytes: dict_batch,
        n_batches,
        dict_total_bytes: n_batches * dict_batch,
        applicable: !class.is_ordered(),
    }
}
