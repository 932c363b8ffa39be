use serde::{Deserialize, Serialize};
use thiserror::Error;

/// How value lengths are drawn for string columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LengthLaw {
    Fixed {
        len: u32,
    },
    /// Each distinct value gets a length drawn uniformly from `[min, max]`.
    Uniform {
        min: u32,
        max: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValueType {
    /// `base + id * stride + jitter`, jitter in `[0, stride)`. A stride of 1
    /// gives a dense integer range.
    Int64 {
        #[serde(default)]
        base: i64,
        #[serde(default = "one")]
        stride: u64,
    },
    Double,
    String {
        length: LengthLaw,
    },
}

fn one() -> u64 {
    1
}

/// Physical arrangement of values across rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// Independent uniform draws.
    Uniform,
    /// Ascending, each value occupying a contiguous run of rows.
    Sorted,
    /// Sorted blocks, each shuffled internally, written in random block order.
    Partitioned { partitions: u32 },
    /// Sorted with per-row value jitter of about a tenth of a row group's
    /// value span, so neighbouring groups overlap a little.
    Clustered,
    /// Independent Zipf draws with exponent `s`.
    Skewed { s: f64 },
}

impl Layout {
    pub fn label(&self) -> &'static str {
        match self {
            Layout::Uniform => "uniform",
            Layout::Sorted => "sorted",
            Layout::Partitioned { .. } => "partitioned",
            Layout::Clustered => "clustered",
            Layout::Skewed { .. } => "skewed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub value_type: ValueType,
    pub ndv_true: u64,
    pub rows: u64,
    #[serde(default)]
    pub null_fraction: f64,
    pub layout: Layout,
    pub row_group_rows: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
}

/// A corpus description: one entry per output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub files: Vec<FileSpec>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("column {column:?}: {reason}")]
    InvalidColumn { column: String, reason: String },
    #[error("file {file:?}: {reason}")]
    InvalidFile { file: String, reason: String },
}

/// Base-26 digits needed to give `ndv` values distinct fixed-width prefixes.
pub fn prefix_width(ndv: u64) -> u32 {
    let mut width = 1;
    let mut capacity = 26u64;
    while capacity < ndv {
        width += 1;
        capacity = capacity.saturating_mul(26);
    }
    width
}

impl ColumnSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let fail = |reason: String| Err(SpecError::InvalidColumn { column: self.name.clone(), reason });
        if self.name.is_empty() {
            return fail("name must not be empty".into());
        }
        if self.rows == 0 {
            return fail("rows must be >= 1".into());
        }
        if self.row_group_rows == 0 {
            return fail("row_group_rows must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.null_fraction) {
            return fail(format!("null_fraction {} outside [0, 1)", self.null_fraction));
        }
        // Independent draws treat ndv_true as a population size; the other
        // layouts place every value and need room for all of them.
        let capacity = self.rows as f64 * (1.0 - self.null_fraction);
        let draws = matches!(self.layout, Layout::Uniform | Layout::Skewed { .. });
        if self.ndv_true == 0 || (!draws && self.ndv_true as f64 > capacity) {
            return fail(format!(
                "ndv_true {} must be in [1, rows * (1 - null_fraction)] = [1, {capacity}]",
                self.ndv_true
            ));
        }
        match self.layout {
            Layout::Partitioned { partitions: 0 } => return fail("partitions must be >= 1".into()),
            Layout::Skewed { s } if !(s > 0.0 && s.is_finite()) => {
                return fail(format!("zipf exponent {s} must be > 0"))
            }
            _ => {}
        }
        match self.value_type {
            ValueType::Int64 { base, stride } => {
                if stride == 0 {
                    return fail("stride must be >= 1".into());
                }
                let top = i128::from(base) + i128::from(self.ndv_true) * i128::from(stride);
                if top > i128::from(i64::MAX) {
                    return fail("base + ndv_true * stride overflows INT64".into());
                }
            }
            ValueType::Double => {
                if self.ndv_true > 1 << 52 {
                    return fail("DOUBLE columns support at most 2^52 distinct values".into());
                }
            }
            ValueType::String { length } => {
                let width = prefix_width(self.ndv_true);
                match length {
                    LengthLaw::Fixed { len } if len < width => {
                        return fail(format!(
                            "fixed length {len} cannot hold {} distinct values (need {width})",
                            self.ndv_true
                        ))
                    }
                    LengthLaw::Uniform { min, max } if min == 0 || min > max || max < width => {
                        return fail(format!("uniform length [{min}, {max}] invalid for {width}-byte prefixes"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

impl FileSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let fail = |reason: String| Err(SpecError::InvalidFile { file: self.name.clone(), reason });
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return fail("name must be a non-empty file stem".into());
        }
        let Some(first) = self.columns.first() else {
            return fail("no columns".into());
        };
        let mut names = std::collections::BTreeSet::new();
        for c in &self.columns {
            c.validate()?;
            if !names.insert(c.name.as_str()) {
                return fail(format!("duplicate column name {:?}", c.name));
            }
            if (c.rows, c.row_group_rows) != (first.rows, first.row_group_rows) {
                return fail(format!("column {:?}: all columns must share rows and row_group_rows", c.name));
            }
        }
        Ok(())
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let mut names = std::collections::BTreeSet::new();
        for f in &self.files {
            f.validate()?;
            if !names.insert(f.name.as_str()) {
                return Err(SpecError::InvalidFile { file: f.name.clone(), reason: "duplicate file name".into() });
            }
        }
        Ok(())
    }
}
