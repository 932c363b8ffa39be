use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parquet physical storage type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhysicalType {
    Boolean,
    Int32,
    Int64,
    Int96,
    Float,
    Double,
    ByteArray,
    FixedLenByteArray,
}

impl PhysicalType {
    /// Exact value width for fixed-width types.
    pub fn fixed_width(self, type_length: Option<u32>) -> Option<u32> {
        match self {
            PhysicalType::Boolean => Some(1),
            PhysicalType::Int32 | PhysicalType::Float => Some(4),
            PhysicalType::Int64 | PhysicalType::Double => Some(8),
            PhysicalType::Int96 => Some(12),
            PhysicalType::FixedLenByteArray => type_length,
            PhysicalType::ByteArray => None,
        }
    }
}

/// Schema-level interpretation of a column's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LogicalKind {
    Integer,
    Float,
    Date,
    Timestamp,
    String,
    Binary,
    Boolean,
    Decimal,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnType {
    pub physical: PhysicalType,
    pub logical: LogicalKind,
    /// False only for integers annotated as unsigned.
    pub signed: bool,
}

impl ColumnType {
    pub const fn new(physical: PhysicalType, logical: LogicalKind) -> Self {
        Self { physical, logical, signed: true }
    }

    pub const fn unsigned(mut self) -> Self {
        self.signed = false;
        self
    }

    /// Integer-valued physical storage with a well-defined numeric order.
    pub fn is_integral(&self) -> bool {
        matches!(self.physical, PhysicalType::Int32 | PhysicalType::Int64)
            && matches!(self.logical, LogicalKind::Integer | LogicalKind::Date | LogicalKind::Timestamp)
    }
}

/// Raw min/max statistic bytes as stored in the footer (plain encoding,
/// without the length prefix for byte arrays).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatValue(pub Vec<u8>);

impl StatValue {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn byte_len(&self) -> usize {
        self.0.len()
    }
}

impl From<&[u8]> for StatValue {
    fn from(bytes: &[u8]) -> Self {
        StatValue(bytes.to_vec())
    }
}

/// Footer facts for one column in one row group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnChunkMeta {
    pub row_group_index: usize,
    /// `total_uncompressed_size` of the chunk in bytes.
    pub uncompressed_size: u64,
    /// Values in the chunk, nulls included.
    pub value_count: u64,
    pub null_count: Option<u64>,
    pub min_value: Option<StatValue>,
    pub max_value: Option<StatValue>,
    pub dictionary_encoded: bool,
    pub physical_type: PhysicalType,
}

impl ColumnChunkMeta {
    pub fn nulls(&self) -> u64 {
        self.null_count.unwrap_or(0)
    }

    pub fn non_null(&self) -> u64 {
        self.value_count.saturating_sub(self.nulls())
    }

    /// Both extrema, when the chunk carries usable statistics.
    pub fn range(&self) -> Option<(&StatValue, &StatValue)> {
        Some((self.min_value.as_ref()?, self.max_value.as_ref()?))
    }
}

/// How complete the footer statistics of a column were.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsCompleteness {
    pub chunks: usize,
    pub chunks_with_null_count: usize,
    pub chunks_with_min_max: usize,
    /// Chunks whose only min/max were the deprecated fields on a type whose
    /// legacy sort order is ambiguous; their extrema were dropped.
    pub deprecated_min_max_dropped: usize,
}

impl StatsCompleteness {
    pub fn null_counts_complete(&self) -> bool {
        self.chunks_with_null_count == self.chunks
    }
}

/// Everything the estimators know about one leaf column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    /// Dotted path for nested schemas.
    pub column_name: String,
    pub column_type: ColumnType,
    pub chunks: Vec<ColumnChunkMeta>,
    pub total_values: u64,
    /// Sum of chunk null counts, absent counts taken as zero.
    pub total_nulls: u64,
    pub fixed_width: Option<u32>,
    pub stats_completeness: StatsCompleteness,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("column profile has no chunks")]
    NoChunks,
    #[error("row group indexes are not strictly increasing")]
    UnorderedChunks,
    #[error("row group {0}: null count exceeds value count")]
    NullsExceedValues(usize),
}

impl ColumnProfile {
    /// Build a profile, deriving the totals from `chunks`.
    pub fn new(
        column_name: impl Into<String>,
        column_type: ColumnType,
        fixed_width: Option<u32>,
        chunks: Vec<ColumnChunkMeta>,
    ) -> Result<Self, ProfileError> {
        if chunks.is_empty() {
            return Err(ProfileError::NoChunks);
        }
        if chunks.windows(2).any(|w| w[0].row_group_index >= w[1].row_group_index) {
            return Err(ProfileError::UnorderedChunks);
        }
        let mut completeness = StatsCompleteness { chunks: chunks.len(), ..Default::default() };
        for chunk in &chunks {
            if let Some(nulls) = chunk.null_count {
                if nulls > chunk.value_count {
                    return Err(ProfileError::NullsExceedValues(chunk.row_group_index));
                }
                completeness.chunks_with_null_count += 1;
            }
            if chunk.range().is_some() {
                completeness.chunks_with_min_max += 1;
            }
        }
        Ok(Self {
            column_name: column_name.into(),
            column_type,
            total_values: chunks.iter().map(|c| c.value_count).sum(),
            total_nulls: chunks.iter().map(ColumnChunkMeta::nulls).sum(),
            chunks,
            fixed_width,
            stats_completeness: completeness,
        })
    }

    pub fn non_null_values(&self) -> u64 {
        self.total_values.saturating_sub(self.total_nulls)
    }

    /// Chunks carrying both a min and a max.
    pub fn ranged_chunks(&self) -> impl Iterator<Item = &ColumnChunkMeta> {
        self.chunks.iter().filter(|c| c.range().is_some())
    }

    /// Smallest min and largest max over all chunks, under the type's order.
    pub fn global_extrema(&self) -> Option<(&StatValue, &StatValue)> {
        let ty = self.column_type;
        let mut out: Option<(&StatValue, &StatValue)> = None;
        for (lo, hi) in self.chunks.iter().filter_map(ColumnChunkMeta::range) {
            out = Some(match out {
                None => (lo, hi),
                Some((glo, ghi)) => {
                    let lo = match compare_stat_values(lo, glo, ty) {
                        Some(Ordering::Less) => lo,
                        Some(_) => glo,
                        None => return None,
                    };
                    let hi = match compare_stat_values(hi, ghi, ty) {
                        Some(Ordering::Greater) => hi,
                        Some(_) => ghi,
                        None => return None,
                    };
                    (lo, hi)
                }
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot interpret {physical:?}/{logical:?} statistic of {len} bytes as an ordering key")]
pub struct UninterpretableStatistic {
    pub physical: PhysicalType,
    pub logical: LogicalKind,
    pub len: usize,
}

fn fixed<const N: usize>(raw: &[u8]) -> Option<[u8; N]> {
    raw.get(..N)?.try_into().ok()
}

/// Exact integer value of an integer-typed statistic.
pub fn decode_integer(raw: &[u8], ty: ColumnType) -> Option<i128> {
    match (ty.physical, ty.signed) {
        (PhysicalType::Int32, true) => Some(i32::from_le_bytes(fixed(raw)?) as i128),
        (PhysicalType::Int32, false) => Some(u32::from_le_bytes(fixed(raw)?) as i128),
        (PhysicalType::Int64, true) => Some(i64::from_le_bytes(fixed(raw)?) as i128),
        (PhysicalType::Int64, false) => Some(u64::from_le_bytes(fixed(raw)?) as i128),
        _ => None,
    }
}

/// Big-endian two's complement, as used by decimals stored in byte arrays.
fn decode_be_signed(raw: &[u8]) -> Option<i128> {
    if raw.is_empty() || raw.len() > 16 {
        return None;
    }
    let fill = if raw[0] & 0x80 != 0 { 0xff } else { 0x00 };
    let mut buf = [fill; 16];
    buf[16 - raw.len()..].copy_from_slice(raw);
    Some(i128::from_be_bytes(buf))
}

/// First eight bytes as a big-endian unsigned integer, right-padded with zeros.
pub fn byte_prefix_key(raw: &[u8]) -> u64 {
    let mut buf = [0u8; 8];
    let n = raw.len().min(8);
    buf[..n].copy_from_slice(&raw[..n]);
    u64::from_be_bytes(buf)
}

/// Map a statistic to a real number that preserves the type's order.
///
/// Numbers map to their value, dates and timestamps to their stored epoch
/// integer, strings and binary to their 8-byte big-endian prefix.
pub fn interpret_ordering_key(raw: &[u8], ty: ColumnType) -> Result<f64, UninterpretableStatistic> {
    let err = || UninterpretableStatistic { physical: ty.physical, logical: ty.logical, len: raw.len() };
    let key = match ty.physical {
        PhysicalType::Boolean => raw.first().map(|b| f64::from(*b & 1)),
        PhysicalType::Int32 | PhysicalType::Int64 => decode_integer(raw, ty).map(|v| v as f64),
        PhysicalType::Float => fixed::<4>(raw).map(|b| f64::from(f32::from_le_bytes(b))),
        PhysicalType::Double => fixed::<8>(raw).map(f64::from_le_bytes),
        PhysicalType::Int96 => None,
        PhysicalType::ByteArray | PhysicalType::FixedLenByteArray => {
            if ty.logical == LogicalKind::Decimal {
                decode_be_signed(raw).map(|v| v as f64)
            } else {
                Some(byte_prefix_key(raw) as f64)
            }
        }
    };
    key.filter(|k| k.is_finite()).ok_or_else(err)
}

/// Compare two statistics under the column type's order. Byte-like types
/// compare lexicographically on the full value, not just the key prefix.
pub fn compare_stat_values(a: &StatValue, b: &StatValue, ty: ColumnType) -> Option<Ordering> {
    match ty.physical {
        PhysicalType::ByteArray | PhysicalType::FixedLenByteArray if ty.logical != LogicalKind::Decimal => {
            Some(a.as_bytes().cmp(b.as_bytes()))
        }
        PhysicalType::Int32 | PhysicalType::Int64 => {
            Some(decode_integer(a.as_bytes(), ty)?.cmp(&decode_integer(b.as_bytes(), ty)?))
        }
        _ => {
            let ka = interpret_ordering_key(a.as_bytes(), ty).ok()?;
            let kb = interpret_ordering_key(b.as_bytes(), ty).ok()?;
            ka.partial_cmp(&kb)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STRING: ColumnType = ColumnType::new(PhysicalType::ByteArray, LogicalKind::String);
    const INT32: ColumnType = ColumnType::new(PhysicalType::Int32, LogicalKind::Integer);

    #[test]
    fn int32_key_is_identity() {
        assert_eq!(interpret_ordering_key(&42i32.to_le_bytes(), INT32).unwrap(), 42.0);
        assert_eq!(interpret_ordering_key(&(-7i32).to_le_bytes(), INT32).unwrap(), -7.0);
    }

    #[test]
    fn unsigned_ints_use_unsigned_order() {
        let ty = INT32.unsigned();
        assert_eq!(interpret_ordering_key(&u32::MAX.to_le_bytes(), ty).unwrap(), u32::MAX as f64);
    }

    #[test]
    fn string_prefix_order() {
        let a = interpret_ordering_key(b"a", STRING).unwrap();
        let b = interpret_ordering_key(b"b", STRING).unwrap();
        assert!(a < b);
        let apple = interpret_ordering_key(b"apple", STRING).unwrap();
        let applf = interpret_ordering_key(b"applf", STRING).unwrap();
        assert_eq!(applf - apple, 256f64.powi(3));
    }

    #[test]
    fn int96_is_uninterpretable() {
        let ty = ColumnType::new(PhysicalType::Int96, LogicalKind::Timestamp);
        assert!(interpret_ordering_key(&[0u8; 12], ty).is_err());
    }

    #[test]
    fn short_numeric_statistic_is_uninterpretable() {
        assert!(interpret_ordering_key(&[1, 2], INT32).is_err());
    }

    #[test]
    fn decimal_byte_array_is_signed_big_endian() {
        let ty = ColumnType::new(PhysicalType::FixedLenByteArray, LogicalKind::Decimal);
        assert_eq!(interpret_ordering_key(&[0xff, 0xfe], ty).unwrap(), -2.0);
        assert_eq!(interpret_ordering_key(&[0x01, 0x00], ty).unwrap(), 256.0);
    }

    #[test]
    fn profile_rejects_unordered_chunks() {
        let chunk = |i| ColumnChunkMeta {
            row_group_index: i,
            uncompressed_size: 10,
            value_count: 5,
            null_count: Some(0),
            min_value: None,
            max_value: None,
            dictionary_encoded: true,
            physical_type: PhysicalType::Int32,
        };
        assert_eq!(
            ColumnProfile::new("c", INT32, Some(4), vec![chunk(1), chunk(0)]).unwrap_err(),
            ProfileError::UnorderedChunks
        );
        assert_eq!(ColumnProfile::new("c", INT32, Some(4), vec![]).unwrap_err(), ProfileError::NoChunks);
        let p = ColumnProfile::new("c", INT32, Some(4), vec![chunk(0), chunk(3)]).unwrap();
        assert_eq!(p.total_values, 10);
        assert_eq!(p.stats_completeness.chunks_with_min_max, 0);
    }
}
