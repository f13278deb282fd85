//! Command-line driver and file formats for equilibrium-curve continuation.
//!
//! The numerical work lives in [`bifurcate_core`]; this crate reads TOML run
//! configurations, runs the seed → trace → scan → locate pipeline and
//! writes the curve as CSV and the located events as JSON.

pub mod config;
pub mod output;
pub mod pipeline;

pub use bifurcate_core as core;
pub use config::{ConfigError, ModelKind, RunConfig, SeedGuess};
pub use output::{curve_csv_string, events_json_string, parse_curve_csv, CsvRow};
pub use pipeline::{run, EventRecord, LocatedRecord, RunError, RunOutput};
