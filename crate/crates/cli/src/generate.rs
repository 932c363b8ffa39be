//! Corpus generation from a JSON spec.

use std::path::{Path, PathBuf};

use ndv_scout_synth::{generate_file, CorpusSpec, GenerateError, GroundTruth, SpecError, WriterSettings};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusSpecError {
    #[error("cannot read spec {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("spec {path}: line {line} column {column} at `{field}`: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, field: String, message: String },
    #[error("spec {path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: SpecError,
    },
}

pub fn parse_spec(text: &str, path: &Path) -> Result<CorpusSpec, CorpusSpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: CorpusSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        CorpusSpecError::Parse {
            path: path.into(),
            line: inner.line(),
            column: inner.column(),
            field: e.path().to_string(),
            message: inner.to_string(),
        }
    })?;
    spec.validate().map_err(|source| CorpusSpecError::Invalid { path: path.into(), source })?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<CorpusSpec, CorpusSpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusSpecError::Io { path: path.into(), source })?;
    parse_spec(&text, path)
}

/// Write every file of `spec` into `out_dir`, up to `jobs` at a time.
pub fn generate_corpus(spec: &CorpusSpec, out_dir: &Path, jobs: usize) -> Result<Vec<GroundTruth>, GenerateError> {
    std::fs::create_dir_all(out_dir).map_err(|source| GenerateError::Io { path: out_dir.to_path_buf(), source })?;
    let settings = WriterSettings::default();
    let run = || spec.files.par_iter().map(|f| generate_file(f, out_dir, &settings)).collect::<Result<Vec<_>, _>>();
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// The built-in four-layout corpus used by `validate` examples and tests.
pub const DEFAULT_SPEC: &str = include_str!("../specs/default_corpus.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        let spec = parse_spec(DEFAULT_SPEC, Path::new("default")).unwrap();
        assert!(spec.files.len() >= 4);
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let text = "{\"files\": [{\"name\": \"f\",\n \"columns\": [{\"name\": \"c\", \"bogus\": 1}]}]}";
        let err = parse_spec(text, Path::new("s.json")).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("files[0].columns[0]"), "{err}");
    }

    #[test]
    fn semantic_errors_are_reported() {
        let text = r#"{"files": [{"name": "f", "columns": []}]}"#;
        let err = parse_spec(text, Path::new("s.json")).unwrap_err();
        assert!(matches!(err, CorpusSpecError::Invalid { .. }), "{err}");
    }
}
