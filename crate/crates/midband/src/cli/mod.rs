//! Experiment front end: strict TOML configs, deterministic data files,
//! and hashed run manifests.

mod config;
mod experiments;
mod manifest;

pub use config::{validate, Experiment, ExperimentConfig, Layout, OutputFormat};
pub use experiments::run;
pub use manifest::{sha256_hex, write_tables, Cell, DataTable, OutputRecord, RunManifest};
