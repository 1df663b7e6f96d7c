//! Deterministic run outputs: typed tables, content hashing, and the
//! run manifest.
//!
//! Every experiment reduces to a list of [`DataTable`]s. Rendering is
//! byte-stable for a fixed config: floats print as `{:.12e}` in CSV and
//! as shortest-roundtrip numbers in JSON, row order is the computation
//! order, and nothing else (timestamps, paths, hostnames) leaks into the
//! data files. The manifest records a SHA-256 per file so reruns can be
//! compared without keeping the originals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cli::config::{ExperimentConfig, OutputFormat};
use crate::error::Result;

/// One value in a data table. `Empty` renders as an empty CSV field and
/// JSON `null`, for rows where a column is not applicable.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Flag(bool),
    Text(String),
    Empty,
}

/// A named table with a fixed column order.
#[derive(Debug, Clone)]
pub struct DataTable {
    name: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn new(name: &str, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity must match the column list of `{}`",
            self.name
        );
        self.rows.push(row);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn file_name(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => format!("{}.csv", self.name),
            OutputFormat::Json => format!("{}.json", self.name),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match cell {
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::UInt(v) => write!(out, "{v}").unwrap(),
                    Cell::Float(v) => write!(out, "{v:.12e}").unwrap(),
                    Cell::Flag(v) => write!(out, "{v}").unwrap(),
                    Cell::Text(v) => {
                        assert!(
                            !v.contains([',', '"', '\n']),
                            "text cells must not need quoting"
                        );
                        out.push_str(v);
                    }
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let columns: Vec<serde_json::Value> = self
            .columns
            .iter()
            .map(|c| serde_json::Value::String((*c).to_string()))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                serde_json::Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Cell::Int(v) => serde_json::json!(v),
                            Cell::UInt(v) => serde_json::json!(v),
                            Cell::Float(v) => serde_json::Number::from_f64(*v)
                                .map(serde_json::Value::Number)
                                .unwrap_or(serde_json::Value::Null),
                            Cell::Flag(v) => serde_json::json!(v),
                            Cell::Text(v) => serde_json::json!(v),
                            Cell::Empty => serde_json::Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = serde_json::json!({
            "columns": serde_json::Value::Array(columns),
            "rows": serde_json::Value::Array(rows),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables serialize");
        text.push('\n');
        text
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

/// One written data file, identified by content hash.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutputRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// The record of one experiment run. Everything except `wall_ms` is a
/// pure function of the config, so reruns can be checked file-by-file
/// against `outputs`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub wall_ms: u128,
    pub outputs: Vec<OutputRecord>,
    pub summary: serde_json::Value,
    pub pass: bool,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }
}

/// Writes each table under `dir` in the requested format and returns the
/// hash records, in table order.
pub fn write_tables(
    dir: &Path,
    tables: &[DataTable],
    format: OutputFormat,
) -> Result<Vec<OutputRecord>> {
    fs::create_dir_all(dir)?;
    let mut records = Vec::with_capacity(tables.len());
    for table in tables {
        let name = table.file_name(format);
        let content = table.render(format);
        fs::write(dir.join(&name), content.as_bytes())?;
        records.push(OutputRecord {
            name,
            sha256: sha256_hex(content.as_bytes()),
            bytes: content.len() as u64,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> DataTable {
        let mut t = DataTable::new("sample", vec!["idx", "value", "ok"]);
        t.push_row(vec![Cell::Int(0), Cell::Float(0.5), Cell::Flag(true)]);
        t.push_row(vec![Cell::Int(1), Cell::Empty, Cell::Flag(false)]);
        t
    }

    #[test]
    fn csv_renders_fixed_precision_and_empty_fields() {
        let csv = sample_table().render(OutputFormat::Csv);
        assert_eq!(csv, "idx,value,ok\n0,5.000000000000e-1,true\n1,,false\n");
    }

    #[test]
    fn json_preserves_column_order_and_nulls() {
        let json = sample_table().render(OutputFormat::Json);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["columns"][1], "value");
        assert_eq!(doc["rows"][1][1], serde_json::Value::Null);
        assert_eq!(doc["rows"][0][1], serde_json::json!(0.5));
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn rendering_is_reproducible() {
        let a = sample_table().render(OutputFormat::Csv);
        let b = sample_table().render(OutputFormat::Csv);
        assert_eq!(sha256_hex(a.as_bytes()), sha256_hex(b.as_bytes()));
    }

    #[test]
    #[should_panic(expected = "row arity")]
    fn arity_mismatch_panics() {
        let mut t = DataTable::new("bad", vec!["one", "two"]);
        t.push_row(vec![Cell::Int(1)]);
    }
}
