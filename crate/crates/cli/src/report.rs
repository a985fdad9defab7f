//! Output files: CSV with `#` metadata lines ahead of the header row, or JSON of the form
//! `{"metadata": …, "data": …}`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::{invalid, ConfigError, Format, RunConfig};

/// Directory that relative and default output paths resolve against.
pub const OUTPUT_DIR_ENV: &str = "SHALLOWDIRAC_OUTPUT_DIR";

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub timestamp: String,
    /// Command options that are not part of the run config.
    pub options: BTreeMap<String, String>,
    pub config: RunConfig,
    /// Requested tolerances.
    pub tolerances: Value,
    /// Achieved error estimates and diagnostics.
    pub achieved: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: "shallowdirac",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            options: BTreeMap::new(),
            config: config.clone(),
            tolerances: Value::Null,
            achieved: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl ToString) {
        self.options.insert(key.into(), value.to_string());
    }

    pub fn achieved(&mut self, key: &str, value: f64) {
        self.achieved.insert(key.into(), value);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn csv_lines(&self) -> Vec<String> {
        vec![
            format!("tool: {} {}", self.tool, self.version),
            format!("command: {}", self.command),
            format!("timestamp: {}", self.timestamp),
            format!("options: {}", json(&self.options)),
            format!("config: {}", json(&self.config)),
            format!("tolerances: {}", self.tolerances),
            format!("achieved: {}", json(&self.achieved)),
        ]
        .into_iter()
        .chain(self.notes.iter().map(|n| format!("note: {n}")))
        .collect()
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("metadata serializes")
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Empty when absent.
    Opt(Option<f64>),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) | Cell::Opt(Some(v)) => format_float(*v),
            Cell::Opt(None) => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 {
        "0".into()
    } else if !(1e-4..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// Resolves `path` (or `default_name` when absent) against the output directory
    /// from the environment. Without either, output goes to stdout.
    pub fn resolve(
        path: Option<&Path>,
        default_name: &str,
        field: &str,
    ) -> Result<Self, ConfigError> {
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
        let path = match (path, dir) {
            (Some(p), _) if p == Path::new("-") => return Ok(Self::Stdout),
            (Some(p), Some(d)) if p.is_relative() => d.join(p),
            (Some(p), _) => p.to_path_buf(),
            (None, Some(d)) => d.join(default_name),
            (None, None) => return Ok(Self::Stdout),
        };
        let parent = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        if !parent.is_dir() {
            return Err(invalid(
                field,
                format!("directory {} does not exist", parent.display()),
            ));
        }
        if path.is_dir() {
            return Err(invalid(field, format!("{} is a directory", path.display())));
        }
        Ok(Self::File(path))
    }

    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match self {
            Self::Stdout => Box::new(io::stdout().lock()),
            Self::File(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
        })
    }
}

pub fn write_csv(dest: &Destination, meta: &Metadata, table: &Table) -> Result<()> {
    let mut out = dest.open()?;
    for line in meta.csv_lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(dest: &Destination, meta: &Metadata, data: Value) -> Result<()> {
    let mut out = dest.open()?;
    let doc = serde_json::json!({ "metadata": meta, "data": data });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write(
    dest: &Destination,
    format: Format,
    meta: &Metadata,
    table: &Table,
    data: Value,
) -> Result<()> {
    match format {
        Format::Csv => write_csv(dest, meta, table),
        Format::Json => write_json(dest, meta, data),
    }
}
