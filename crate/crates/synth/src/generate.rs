use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use parquet::basic::{Compression, LogicalType, Repetition, Type as PhysicalType};
use parquet::data_type::{ByteArray, ByteArrayType, DoubleType, Int64Type};
use parquet::errors::ParquetError;
use parquet::file::properties::{EnabledStatistics, WriterProperties};
use parquet::file::writer::SerializedFileWriter;
use parquet::schema::types::Type;
use thiserror::Error;

use crate::spec::{ColumnSpec, FileSpec, SpecError, ValueType};
use crate::truth::{ColumnTruth, GroundTruth, GroupTruth, WriterSettings, SIDECAR_SUFFIX};
use crate::values::{generate_ids, ValueMap};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("writer cannot produce the requested file: {0}")]
    WriterCapability(String),
    #[error("parquet writer failed: {0}")]
    Parquet(#[from] ParquetError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("sidecar serialization failed: {0}")]
    Sidecar(#[from] serde_json::Error),
}

/// A column's ids and value mapping, ready to be summarized or written.
pub(crate) struct GeneratedColumn<'a> {
    pub spec: &'a ColumnSpec,
    pub ids: Vec<Option<u64>>,
    pub map: ValueMap,
}

impl<'a> GeneratedColumn<'a> {
    pub fn new(spec: &'a ColumnSpec) -> Self {
        Self { spec, ids: generate_ids(spec), map: ValueMap::new(spec) }
    }

    pub fn group_bounds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let step = self.spec.row_group_rows as usize;
        (0..self.ids.len()).step_by(step).map(move |start| (start, (start + step).min(self.ids.len())))
    }

    pub fn truth(&self) -> ColumnTruth {
        let mut seen = vec![false; self.spec.ndv_true as usize];
        let per_group = self
            .group_bounds()
            .map(|(start, end)| {
                let rows = &self.ids[start..end];
                for id in rows.iter().flatten() {
                    seen[*id as usize] = true;
                }
                self.group_truth(rows)
            })
            .collect();
        let distinct: Vec<u64> = (0..self.spec.ndv_true).filter(|id| seen[*id as usize]).collect();
        ColumnTruth {
            ndv_true: distinct.len() as u64,
            ndv_requested: self.spec.ndv_true,
            rows: self.spec.rows,
            nulls: self.ids.iter().filter(|id| id.is_none()).count() as u64,
            layout: self.spec.layout.label().into(),
            layout_spec: self.spec.layout,
            value_type: self.spec.value_type,
            mean_len: self.mean_len(&distinct),
            per_group,
        }
    }

    fn group_truth(&self, rows: &[Option<u64>]) -> GroupTruth {
        let mut ids: Vec<u64> = rows.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        GroupTruth {
            rows: rows.len() as u64,
            nulls: rows.iter().filter(|id| id.is_none()).count() as u64,
            distinct: ids.len() as u64,
            min: ids.first().map(|id| self.map.scalar(*id)),
            max: ids.last().map(|id| self.map.scalar(*id)),
            dict_mean_len: self.mean_len(&ids),
        }
    }

    fn mean_len(&self, distinct_ids: &[u64]) -> f64 {
        if distinct_ids.is_empty() {
            return 0.0;
        }
        let total: usize = distinct_ids.iter().map(|id| self.map.byte_len(*id)).sum();
        total as f64 / distinct_ids.len() as f64
    }
}

fn schema(spec: &FileSpec) -> Result<Type, ParquetError> {
    let fields = spec
        .columns
        .iter()
        .map(|c| {
            let repetition = if c.null_fraction > 0.0 { Repetition::OPTIONAL } else { Repetition::REQUIRED };
            let builder = match c.value_type {
                ValueType::Int64 { .. } => Type::primitive_type_builder(&c.name, PhysicalType::INT64),
                ValueType::Double => Type::primitive_type_builder(&c.name, PhysicalType::DOUBLE),
                ValueType::String { .. } => Type::primitive_type_builder(&c.name, PhysicalType::BYTE_ARRAY)
                    .with_logical_type(Some(LogicalType::String)),
            };
            builder.with_repetition(repetition).build().map(Arc::new)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Type::group_type_builder("schema").with_fields(fields).build()
}

fn writer_properties(settings: &WriterSettings) -> Result<WriterProperties, GenerateError> {
    if settings.compression != "UNCOMPRESSED" {
        return Err(GenerateError::WriterCapability(format!(
            "compression {:?} is not enabled in this build",
            settings.compression
        )));
    }
    let statistics = match settings.statistics.as_str() {
        "chunk" => EnabledStatistics::Chunk,
        "page" => EnabledStatistics::Page,
        other => return Err(GenerateError::WriterCapability(format!("statistics level {other:?}"))),
    };
    if !settings.dictionary_enabled {
        return Err(GenerateError::WriterCapability("corpora must be dictionary-encoded".into()));
    }
    Ok(WriterProperties::builder()
        .set_compression(Compression::UNCOMPRESSED)
        .set_statistics_enabled(statistics)
        .set_statistics_truncate_length(settings.statistics_truncate_length)
        .set_dictionary_enabled(true)
        .set_dictionary_page_size_limit(settings.dictionary_page_size_limit_bytes)
        .set_data_page_size_limit(settings.data_page_size_limit_bytes)
        .set_data_page_row_count_limit(settings.data_page_row_count_limit)
        .build())
}

pub fn parquet_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.parquet"))
}

pub fn sidecar_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}{SIDECAR_SUFFIX}"))
}

/// Write `<dir>/<name>.parquet` and its `<name>.truth.json` sidecar.
pub fn generate_file(spec: &FileSpec, dir: &Path, settings: &WriterSettings) -> Result<GroundTruth, GenerateError> {
    spec.validate()?;
    let props = Arc::new(writer_properties(settings)?);
    let columns: Vec<GeneratedColumn> = spec.columns.iter().map(GeneratedColumn::new).collect();

    let path = parquet_path(dir, &spec.name);
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GenerateError::Io { path, source }
    };
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut writer = SerializedFileWriter::new(BufWriter::new(file), Arc::new(schema(spec)?), props)?;
    let bounds: Vec<(usize, usize)> = columns[0].group_bounds().collect();
    for &(start, end) in &bounds {
        let mut group = writer.next_row_group()?;
        for col in &columns {
            let rows = &col.ids[start..end];
            let def: Option<Vec<i16>> =
                (col.spec.null_fraction > 0.0).then(|| rows.iter().map(|id| i16::from(id.is_some())).collect());
            let present = rows.iter().flatten();
            let mut w =
                group.next_column()?.ok_or_else(|| GenerateError::WriterCapability("schema column missing".into()))?;
            match col.spec.value_type {
                ValueType::Int64 { .. } => {
                    let values: Vec<i64> = present.map(|id| col.map.int(*id)).collect();
                    w.typed::<Int64Type>().write_batch(&values, def.as_deref(), None)?;
                }
                ValueType::Double => {
                    let values: Vec<f64> = present.map(|id| col.map.double(*id)).collect();
                    w.typed::<DoubleType>().write_batch(&values, def.as_deref(), None)?;
                }
                ValueType::String { .. } => {
                    let values: Vec<ByteArray> =
                        present.map(|id| ByteArray::from(col.map.string(*id).into_bytes())).collect();
                    w.typed::<ByteArrayType>().write_batch(&values, def.as_deref(), None)?;
                }
            }
            w.close()?;
        }
        group.close()?;
    }
    writer.close()?;

    let truth = GroundTruth {
        file: format!("{}.parquet", spec.name),
        rows: columns[0].spec.rows,
        row_groups: bounds.len(),
        writer: settings.clone(),
        columns: columns.iter().map(|c| (c.spec.name.clone(), c.truth())).collect(),
    };
    let sidecar = sidecar_path(dir, &spec.name);
    let mut out = BufWriter::new(File::create(&sidecar).map_err(io_err(&sidecar))?);
    serde_json::to_writer_pretty(&mut out, &truth)?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(io_err(&sidecar))?;
    info!("wrote {} ({} rows, {} row groups)", path.display(), truth.rows, truth.row_groups);
    Ok(truth)
}

/// Read a sidecar written by [`generate_file`].
pub fn read_sidecar(path: &Path) -> Result<GroundTruth, GenerateError> {
    let file = File::open(path).map_err(|source| GenerateError::Io { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}
