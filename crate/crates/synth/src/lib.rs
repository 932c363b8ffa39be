//! Synthetic Parquet corpora with known distinct-value ground truth.
//!
//! [`generate_file`] writes a Parquet file plus a `<name>.truth.json`
//! sidecar describing exactly what was written. [`simulate_profile`] builds
//! the footer a perfect dictionary writer would have produced for the same
//! data, for fast property sweeps without I/O. [`brute_force_oracle`]
//! re-derives the truth by scanning a file's data pages.

mod generate;
mod oracle;
mod simulate;
mod spec;
mod truth;
mod values;

pub use generate::{generate_file, parquet_path, read_sidecar, sidecar_path, GenerateError};
pub use oracle::{brute_force_oracle, compare_with_truth, OracleColumn};
pub use simulate::{column_truth, column_type, model_profile_from_truth, simulate_profile};
pub use spec::{prefix_width, ColumnSpec, CorpusSpec, FileSpec, Layout, LengthLaw, SpecError, ValueType};
pub use truth::{ColumnTruth, GroundTruth, GroupTruth, Scalar, WriterSettings, SIDECAR_SUFFIX};
pub use values::{generate_ids, ValueMap};
