//! Deterministic table and JSON writers.
//!
//! Floats use Rust's shortest round-trip formatting, so every value re-parses
//! to the identical `f64`. Missing values are empty CSV fields or JSON `null`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format!("{v:?}"),
        Cell::Int(v) => v.to_string(),
        Cell::Missing => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Missing => Value::Null,
    }
}

/// Named columns and rows of cells, written as `<stem>.csv` or `<stem>.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [..], "rows": [[..], ..]}`, keeping column order.
    pub fn to_json(&self) -> Value {
        Value::Object(
            [
                ("columns".to_string(), Value::from(self.columns.clone())),
                (
                    "rows".to_string(),
                    Value::Array(
                        self.rows
                            .iter()
                            .map(|r| Value::Array(r.iter().map(json_cell).collect()))
                            .collect(),
                    ),
                ),
            ]
            .into_iter()
            .collect(),
        )
    }

    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> CliResult<PathBuf> {
        match format {
            Format::Csv => write_text(&dir.join(format!("{stem}.csv")), &self.to_csv()),
            Format::Json => write_json(&dir.join(format!("{stem}.json")), &self.to_json()),
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<PathBuf> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    write_text(path, &text)
}
