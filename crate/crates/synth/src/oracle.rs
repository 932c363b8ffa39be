//! Ground truth by full scan.
//!
//! This is the only code in the workspace that decodes data pages. It exists
//! to check sidecars and estimates, never to produce them.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::path::Path;

use parquet::errors::ParquetError;
use parquet::file::reader::{FileReader, SerializedFileReader};
use parquet::record::Field;

use crate::truth::{ColumnTruth, GroupTruth, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleColumn {
    pub ndv: u64,
    pub rows: u64,
    pub nulls: u64,
    /// Mean byte length over distinct values.
    pub mean_len: f64,
    pub per_group: Vec<GroupTruth>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Key<'a> {
    Int(i64),
    Float(u64),
    Str(&'a str),
}

#[derive(Default)]
struct Accumulator {
    all: HashSet<Vec<u8>>,
    all_len: usize,
    rows: u64,
    nulls: u64,
    groups: Vec<GroupTruth>,
}

fn scalar(field: &Field) -> Result<Option<Scalar>, ParquetError> {
    Ok(match field {
        Field::Null => None,
        Field::Long(v) => Some(Scalar::Int(*v)),
        Field::Double(v) => Some(Scalar::Float(*v)),
        Field::Str(s) => Some(Scalar::Str(s.clone())),
        other => return Err(ParquetError::General(format!("oracle does not handle field {other:?}"))),
    })
}

fn key(s: &Scalar) -> Key<'_> {
    match s {
        Scalar::Int(v) => Key::Int(*v),
        Scalar::Float(v) => Key::Float(v.to_bits()),
        Scalar::Str(v) => Key::Str(v),
    }
}

fn byte_len(s: &Scalar) -> usize {
    match s {
        Scalar::Int(_) | Scalar::Float(_) => 8,
        Scalar::Str(v) => v.len(),
    }
}

fn less(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Int(x), Scalar::Int(y)) => x < y,
        (Scalar::Float(x), Scalar::Float(y)) => x < y,
        (Scalar::Str(x), Scalar::Str(y)) => x < y,
        _ => false,
    }
}

/// Exact per-column NDV, null counts, mean lengths and per-group extrema.
pub fn brute_force_oracle(path: &Path) -> Result<BTreeMap<String, OracleColumn>, ParquetError> {
    let reader = SerializedFileReader::new(File::open(path)?)?;
    let schema = reader.metadata().file_metadata().schema_descr();
    let names: Vec<String> = schema.columns().iter().map(|c| c.path().string()).collect();
    let mut acc: Vec<Accumulator> = names.iter().map(|_| Accumulator::default()).collect();

    for rg in 0..reader.num_row_groups() {
        let group = reader.get_row_group(rg)?;
        let mut values: Vec<Vec<Scalar>> = vec![Vec::new(); names.len()];
        let mut rows = 0u64;
        let mut nulls = vec![0u64; names.len()];
        for row in group.get_row_iter(None)? {
            let row = row?;
            rows += 1;
            for (i, (_, field)) in row.get_column_iter().enumerate() {
                match scalar(field)? {
                    Some(v) => values[i].push(v),
                    None => nulls[i] += 1,
                }
            }
        }
        for (i, vals) in values.into_iter().enumerate() {
            let a = &mut acc[i];
            let mut distinct: HashSet<Key> = HashSet::new();
            let mut dict_len = 0usize;
            let (mut min, mut max): (Option<&Scalar>, Option<&Scalar>) = (None, None);
            for v in &vals {
                if distinct.insert(key(v)) {
                    dict_len += byte_len(v);
                }
                if min.is_none_or(|m| less(v, m)) {
                    min = Some(v);
                }
                if max.is_none_or(|m| less(m, v)) {
                    max = Some(v);
                }
                let bytes = match v {
                    Scalar::Str(s) => s.as_bytes().to_vec(),
                    other => other.to_stat_bytes(),
                };
                let len = byte_len(v);
                if a.all.insert(bytes) {
                    a.all_len += len;
                }
            }
            a.rows += rows;
            a.nulls += nulls[i];
            a.groups.push(GroupTruth {
                rows,
                nulls: nulls[i],
                distinct: distinct.len() as u64,
                min: min.cloned(),
                max: max.cloned(),
                dict_mean_len: if distinct.is_empty() { 0.0 } else { dict_len as f64 / distinct.len() as f64 },
            });
        }
    }

    Ok(names
        .into_iter()
        .zip(acc)
        .map(|(name, a)| {
            let ndv = a.all.len() as u64;
            let mean_len = if ndv == 0 { 0.0 } else { a.all_len as f64 / ndv as f64 };
            (name, OracleColumn { ndv, rows: a.rows, nulls: a.nulls, mean_len, per_group: a.groups })
        })
        .collect())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Differences between an oracle scan and a sidecar column; empty when they
/// agree.
pub fn compare_with_truth(oracle: &OracleColumn, truth: &ColumnTruth) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |what: &str, ok: bool, detail: String| {
        if !ok {
            diffs.push(format!("{what}: {detail}"));
        }
    };
    check("ndv", oracle.ndv == truth.ndv_true, format!("{} vs {}", oracle.ndv, truth.ndv_true));
    check("rows", oracle.rows == truth.rows, format!("{} vs {}", oracle.rows, truth.rows));
    check("nulls", oracle.nulls == truth.nulls, format!("{} vs {}", oracle.nulls, truth.nulls));
    check("mean_len", close(oracle.mean_len, truth.mean_len), format!("{} vs {}", oracle.mean_len, truth.mean_len));
    check(
        "row groups",
        oracle.per_group.len() == truth.per_group.len(),
        format!("{} vs {}", oracle.per_group.len(), truth.per_group.len()),
    );
    for (i, (o, t)) in oracle.per_group.iter().zip(&truth.per_group).enumerate() {
        let same = o.rows == t.rows
            && o.nulls == t.nulls
            && o.distinct == t.distinct
            && o.min == t.min
            && o.max == t.max
            && close(o.dict_mean_len, t.dict_mean_len);
        check(&format!("group {i}"), same, format!("{o:?} vs {t:?}"));
    }
    diffs
}
