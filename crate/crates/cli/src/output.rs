use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::CliError;

pub const TOOL: &str = "hardcore";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `--format` wins; otherwise the extension decides, defaulting to CSV.
    pub fn resolve(flag: Option<Format>, path: Option<&Path>) -> Format {
        flag.unwrap_or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        })
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Relative paths land under `$HARDCORE_OUT_DIR` when it is set.
pub fn resolve_out(out: Option<PathBuf>, default_stem: &str, format: Format) -> PathBuf {
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{default_stem}.{}", format.extension())));
    match std::env::var_os("HARDCORE_OUT_DIR") {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Str(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Str(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Str(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Float(x) => x.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, column: &str) -> Result<Value, CliError> {
        Ok(match self {
            Cell::Int(x) => json!(x),
            Cell::Float(x) => json!(finite(column, *x)?),
            Cell::Str(s) => json!(s),
            Cell::Empty => Value::Null,
        })
    }
}

pub fn finite(what: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::NotFinite(what.to_string()))
    }
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::File::create(path)?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Writes `table` with the config echoed in a `#` preamble (CSV) or a
/// `config` field (JSON).
pub fn write_table(path: &Path, format: Format, config: &Value, table: &Table) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut f = create(path)?;
            writeln!(f, "# {TOOL} {VERSION}")?;
            writeln!(f, "# config: {}", serde_json::to_string(config)?)?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut rows = Vec::with_capacity(table.rows.len());
            for row in &table.rows {
                let mut obj = Map::new();
                for (c, cell) in table.columns.iter().zip(row) {
                    obj.insert(c.clone(), cell.json(c)?);
                }
                rows.push(Value::Object(obj));
            }
            write_json(path, &json!({ "tool": TOOL, "version": VERSION, "config": config, "rows": rows }))?;
        }
    }
    Ok(())
}

pub fn write_sidecar(out: &Path, config: &Value) -> Result<(), CliError> {
    write_json(&sidecar_path(out), &json!({ "tool": TOOL, "version": VERSION, "config": config }))
}
