//! Footer-only ingestion of Parquet column metadata.
//!
//! Only the 8-byte tail and the Thrift-encoded `FileMetaData` block before it
//! are read. Data and dictionary pages are never touched.

mod profile;
mod source;

use std::io;

use log::debug;
use parquet::basic::{ConvertedType, Encoding, LogicalType, Type as ParquetType};
use parquet::file::metadata::{ColumnChunkMetaData, ParquetMetaData, ParquetMetaDataReader};
use parquet::schema::types::ColumnDescriptor;
use thiserror::Error;

pub use profile::{
    byte_prefix_key, compare_stat_values, decode_integer, interpret_ordering_key, ColumnChunkMeta, ColumnProfile,
    ColumnType, LogicalKind, PhysicalType, ProfileError, StatValue, StatsCompleteness, UninterpretableStatistic,
};
pub use source::{ByteSource, RecordingSource};

const MAGIC: &[u8; 4] = b"PAR1";
const ENCRYPTED_MAGIC: &[u8; 4] = b"PARE";
/// Footer length (4 bytes) plus trailing magic.
pub const FOOTER_TAIL_LEN: u64 = 8;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed footer at offset {offset}: {reason}")]
    MalformedFooter { offset: u64, reason: String },
    #[error("unsupported feature at offset {offset}: {reason}")]
    UnsupportedFeature { offset: u64, reason: String },
    #[error("i/o error at offset {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: io::Error,
    },
}

/// Footer facts for one file: the column profiles plus the recorded row count.
#[derive(Debug, Clone, PartialEq)]
pub struct FileProfiles {
    pub num_rows: u64,
    pub num_row_groups: usize,
    /// Byte range `[start, end)` the metadata block occupies.
    pub footer_range: std::ops::Range<u64>,
    pub columns: Vec<ColumnProfile>,
}

/// Read one profile per leaf column from a Parquet footer.
pub fn read_file_profiles<S: ByteSource + ?Sized>(source: &S) -> Result<Vec<ColumnProfile>, IngestError> {
    read_file(source).map(|f| f.columns)
}

/// Like [`read_file_profiles`], keeping file-level footer facts.
pub fn read_file<S: ByteSource + ?Sized>(source: &S) -> Result<FileProfiles, IngestError> {
    let file_len = source.len().map_err(|source| IngestError::Io { offset: 0, source })?;
    if file_len < FOOTER_TAIL_LEN + MAGIC.len() as u64 {
        return Err(IngestError::MalformedFooter {
            offset: 0,
            reason: format!("file is {file_len} bytes, too short for a Parquet footer"),
        });
    }
    let tail_offset = file_len - FOOTER_TAIL_LEN;
    let mut tail = [0u8; FOOTER_TAIL_LEN as usize];
    source.read_exact_at(tail_offset, &mut tail).map_err(|source| IngestError::Io { offset: tail_offset, source })?;

    let magic_offset = tail_offset + 4;
    match &tail[4..] {
        m if m == MAGIC => {}
        m if m == ENCRYPTED_MAGIC => {
            return Err(IngestError::UnsupportedFeature {
                offset: magic_offset,
                reason: "encrypted footer (PARE)".into(),
            })
        }
        other => {
            return Err(IngestError::MalformedFooter {
                offset: magic_offset,
                reason: format!("bad magic {other:02x?}, expected \"PAR1\""),
            })
        }
    }

    let metadata_len = u64::from(u32::from_le_bytes(tail[..4].try_into().expect("4-byte slice")));
    // The leading "PAR1" must still fit in front of the metadata block.
    if metadata_len + FOOTER_TAIL_LEN + MAGIC.len() as u64 > file_len {
        return Err(IngestError::MalformedFooter {
            offset: tail_offset,
            reason: format!("footer length {metadata_len} exceeds file size {file_len}"),
        });
    }
    let metadata_offset = tail_offset - metadata_len;
    let mut buf = vec![0u8; metadata_len as usize];
    source
        .read_exact_at(metadata_offset, &mut buf)
        .map_err(|source| IngestError::Io { offset: metadata_offset, source })?;

    let metadata = ParquetMetaDataReader::decode_metadata(&buf).map_err(|e| IngestError::MalformedFooter {
        offset: metadata_offset,
        reason: format!("thrift decode failed: {e}"),
    })?;
    if metadata.file_metadata().schema_descr().columns().iter().any(|c| c.max_rep_level() > 0) {
        debug!("file has repeated columns; value counts are leaf-level, not rows");
    }
    let columns = build_profiles(&metadata)
        .map_err(|e| IngestError::MalformedFooter { offset: metadata_offset, reason: e.to_string() })?;
    Ok(FileProfiles {
        num_rows: metadata.file_metadata().num_rows().max(0) as u64,
        num_row_groups: metadata.num_row_groups(),
        footer_range: metadata_offset..tail_offset,
        columns,
    })
}

fn build_profiles(metadata: &ParquetMetaData) -> Result<Vec<ColumnProfile>, ProfileError> {
    if metadata.num_row_groups() == 0 {
        return Ok(Vec::new());
    }
    let schema = metadata.file_metadata().schema_descr();
    schema
        .columns()
        .iter()
        .enumerate()
        .map(|(leaf, descr)| {
            let column_type = column_type(descr);
            let mut dropped = 0;
            let chunks = metadata
                .row_groups()
                .iter()
                .enumerate()
                .map(|(rg, group)| {
                    let (chunk, was_dropped) = chunk_meta(rg, group.column(leaf), column_type);
                    dropped += usize::from(was_dropped);
                    chunk
                })
                .collect();
            let type_length = u32::try_from(descr.type_length()).ok();
            let mut profile = ColumnProfile::new(
                descr.path().string(),
                column_type,
                column_type.physical.fixed_width(type_length),
                chunks,
            )?;
            profile.stats_completeness.deprecated_min_max_dropped = dropped;
            Ok(profile)
        })
        .collect()
}

/// Returns the chunk and whether deprecated min/max were discarded.
fn chunk_meta(row_group_index: usize, meta: &ColumnChunkMetaData, ty: ColumnType) -> (ColumnChunkMeta, bool) {
    let dictionary_encoded =
        meta.encodings().any(|e| matches!(e, Encoding::PLAIN_DICTIONARY | Encoding::RLE_DICTIONARY));
    let stats = meta.statistics();
    let null_count = stats.and_then(|s| s.null_count_opt());

    let mut dropped = false;
    let (mut min_value, mut max_value) = match stats {
        // Legacy min/max used signed byte order for strings; only trust them
        // where that order is unambiguous.
        Some(s) if s.is_min_max_deprecated() && !legacy_order_is_sound(ty) => {
            dropped = s.min_bytes_opt().is_some() || s.max_bytes_opt().is_some();
            (None, None)
        }
        Some(s) => (s.min_bytes_opt().map(StatValue::from), s.max_bytes_opt().map(StatValue::from)),
        None => (None, None),
    };
    if let (Some(lo), Some(hi)) = (&min_value, &max_value) {
        if compare_stat_values(lo, hi, ty) == Some(std::cmp::Ordering::Greater) {
            debug!("row group {row_group_index}: min > max, dropping extrema");
            min_value = None;
            max_value = None;
        }
    }

    let chunk = ColumnChunkMeta {
        row_group_index,
        uncompressed_size: meta.uncompressed_size().max(0) as u64,
        value_count: meta.num_values().max(0) as u64,
        null_count,
        min_value,
        max_value,
        dictionary_encoded,
        physical_type: physical_type(meta.column_type()),
    };
    (chunk, dropped)
}

fn legacy_order_is_sound(ty: ColumnType) -> bool {
    ty.signed && matches!(ty.logical, LogicalKind::Integer | LogicalKind::Date) && ty.is_integral()
}

fn physical_type(t: ParquetType) -> PhysicalType {
    match t {
        ParquetType::BOOLEAN => PhysicalType::Boolean,
        ParquetType::INT32 => PhysicalType::Int32,
        ParquetType::INT64 => PhysicalType::Int64,
        ParquetType::INT96 => PhysicalType::Int96,
        ParquetType::FLOAT => PhysicalType::Float,
        ParquetType::DOUBLE => PhysicalType::Double,
        ParquetType::BYTE_ARRAY => PhysicalType::ByteArray,
        ParquetType::FIXED_LEN_BYTE_ARRAY => PhysicalType::FixedLenByteArray,
    }
}

fn column_type(descr: &ColumnDescriptor) -> ColumnType {
    let physical = physical_type(descr.physical_type());
    let from_physical = || match physical {
        PhysicalType::Boolean => ColumnType::new(physical, LogicalKind::Boolean),
        PhysicalType::Int32 | PhysicalType::Int64 => ColumnType::new(physical, LogicalKind::Integer),
        PhysicalType::Int96 => ColumnType::new(physical, LogicalKind::Timestamp),
        PhysicalType::Float | PhysicalType::Double => ColumnType::new(physical, LogicalKind::Float),
        PhysicalType::ByteArray | PhysicalType::FixedLenByteArray => ColumnType::new(physical, LogicalKind::Binary),
    };

    if let Some(logical) = descr.logical_type_ref() {
        let kind = match logical {
            LogicalType::String | LogicalType::Enum | LogicalType::Json => Some(LogicalKind::String),
            LogicalType::Decimal { .. } => Some(LogicalKind::Decimal),
            LogicalType::Date => Some(LogicalKind::Date),
            LogicalType::Timestamp(_) => Some(LogicalKind::Timestamp),
            LogicalType::Integer(int) => {
                let ty = ColumnType::new(physical, LogicalKind::Integer);
                return if int.is_signed { ty } else { ty.unsigned() };
            }
            LogicalType::Bson | LogicalType::Uuid => Some(LogicalKind::Binary),
            _ => Some(LogicalKind::Other),
        };
        if let Some(kind) = kind {
            return ColumnType::new(physical, kind);
        }
    }

    match descr.converted_type() {
        ConvertedType::UTF8 | ConvertedType::ENUM | ConvertedType::JSON => {
            ColumnType::new(physical, LogicalKind::String)
        }
        ConvertedType::DECIMAL => ColumnType::new(physical, LogicalKind::Decimal),
        ConvertedType::DATE => ColumnType::new(physical, LogicalKind::Date),
        ConvertedType::TIMESTAMP_MILLIS | ConvertedType::TIMESTAMP_MICROS => {
            ColumnType::new(physical, LogicalKind::Timestamp)
        }
        ConvertedType::UINT_8 | ConvertedType::UINT_16 | ConvertedType::UINT_32 | ConvertedType::UINT_64 => {
            ColumnType::new(physical, LogicalKind::Integer).unsigned()
        }
        ConvertedType::INT_8 | ConvertedType::INT_16 | ConvertedType::INT_32 | ConvertedType::INT_64 => {
            ColumnType::new(physical, LogicalKind::Integer)
        }
        ConvertedType::NONE => from_physical(),
        _ => ColumnType::new(physical, LogicalKind::Other),
    }
}
