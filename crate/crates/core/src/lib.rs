//! Metadata-only distinct-value estimation for Parquet columns.
//!
//! Everything here works from the file footer alone: chunk sizes, value and
//! null counts, encodings and row-group min/max statistics. No data page is
//! ever read.
//!
//! - [`ingest`] decodes the footer into per-column [`ingest::ColumnProfile`]s.
//! - [`dict`] inverts the dictionary storage-size equation per chunk.
//! - [`minmax`] inverts the coupon-collector law on distinct row-group extrema.
//! - [`distribution`] classifies the physical layout from range geometry.
//! - [`estimator`] combines and bounds the estimates and predicts batch
//!   dictionary memory.
//! - [`pipeline`] runs all of the above for each column of a file.

pub mod dict;
pub mod distribution;
pub mod estimator;
pub mod ingest;
pub mod minmax;
pub mod numeric;
pub mod pipeline;

pub use pipeline::{estimate_column, estimate_source, ColumnReport, EstimateOptions, Warning};
