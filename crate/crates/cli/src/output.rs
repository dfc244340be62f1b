//! Rendering of command results as a human table, CSV or JSON.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[value(name = "table")]
    HumanTable,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    /// 17 significant digits, `.` decimal separator.
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn human(&self) -> String {
        match self {
            Cell::Num(v) if *v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e6) => format!("{v:.6}"),
            Cell::Num(v) => format!("{v:.6e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => "-".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    fn to_human(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::human).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.columns[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&self.columns);
        out.push('\n');
        out.push_str(&line(
            &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>(),
        ));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub parameters: Value,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical invocations.
    pub timestamp_unix: u64,
}

impl Manifest {
    pub fn new(subcommand: &'static str, parameters: Value) -> Self {
        Manifest {
            tool: "polcorr",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            parameters,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Everything a subcommand produces.
pub struct Report {
    pub manifest: Manifest,
    pub results: Value,
    pub table: Table,
    /// Lines printed under the human table only.
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    manifest: &'a Manifest,
    results: &'a Value,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::HumanTable => {
                let mut out = self.table.to_human();
                for n in &self.notes {
                    out.push_str(n);
                    out.push('\n');
                }
                Ok(out)
            }
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => {
                let doc = JsonDocument {
                    manifest: &self.manifest,
                    results: &self.results,
                };
                let mut s = serde_json::to_string_pretty(&doc)?;
                s.push('\n');
                Ok(s)
            }
        }
    }

    /// Writes to `path`, or stdout when absent. Table and CSV files get a
    /// `<path>.manifest.json` sidecar.
    pub fn emit(&self, format: OutputFormat, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        match path {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
            Some(p) => {
                std::fs::write(p, text)?;
                if format != OutputFormat::Json {
                    let mut s = serde_json::to_string_pretty(&self.manifest)?;
                    s.push('\n');
                    std::fs::write(sidecar_path(p), s)?;
                }
            }
        }
        Ok(())
    }
}

pub fn sidecar_path(p: &Path) -> PathBuf {
    let mut name = p.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
