use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::spec::{Layout, ValueType};

/// A statistic value in human-readable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Scalar {
    /// Plain-encoded bytes, as a writer stores them in footer statistics.
    pub fn to_stat_bytes(&self) -> Vec<u8> {
        match self {
            Scalar::Int(v) => v.to_le_bytes().to_vec(),
            Scalar::Float(v) => v.to_le_bytes().to_vec(),
            Scalar::Str(s) => s.as_bytes().to_vec(),
        }
    }
}

/// Writer configuration a corpus was produced with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriterSettings {
    pub writer: String,
    pub statistics: String,
    /// `None` means min/max statistics are never truncated.
    pub statistics_truncate_length: Option<usize>,
    pub dictionary_enabled: bool,
    pub dictionary_page_size_limit_bytes: usize,
    pub data_page_size_limit_bytes: usize,
    pub data_page_row_count_limit: usize,
    pub compression: String,
}

impl Default for WriterSettings {
    fn default() -> Self {
        Self {
            writer: "parquet-rs 60.0.0".into(),
            statistics: "chunk".into(),
            statistics_truncate_length: None,
            dictionary_enabled: true,
            dictionary_page_size_limit_bytes: 1024 * 1024,
            data_page_size_limit_bytes: 1024 * 1024,
            data_page_row_count_limit: 20_000,
            compression: "UNCOMPRESSED".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTruth {
    pub rows: u64,
    pub nulls: u64,
    pub distinct: u64,
    pub min: Option<Scalar>,
    pub max: Option<Scalar>,
    /// Mean byte length over the group's distinct values (its dictionary).
    pub dict_mean_len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnTruth {
    /// Exact distinct non-null values in the column.
    pub ndv_true: u64,
    /// The requested population size; uniform and skewed draws may not hit
    /// every value.
    pub ndv_requested: u64,
    pub rows: u64,
    pub nulls: u64,
    pub layout: String,
    pub layout_spec: Layout,
    pub value_type: ValueType,
    /// Mean byte length over the column's distinct values.
    pub mean_len: f64,
    pub per_group: Vec<GroupTruth>,
}

/// Sidecar document written next to each generated file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub file: String,
    pub rows: u64,
    pub row_groups: usize,
    pub writer: WriterSettings,
    pub columns: BTreeMap<String, ColumnTruth>,
}

pub const SIDECAR_SUFFIX: &str = ".truth.json";
