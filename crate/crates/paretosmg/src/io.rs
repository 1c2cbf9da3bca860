//! CSV and JSON artifacts.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), which reads back
//! to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult, ExitKind};

/// A header plus rows of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of column `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.16e}")
    }
}

/// Names `prefix1 .. prefix{count}`.
pub fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

pub fn write_table(path: &Path, table: &Table) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::from(e).context(path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&v| format_number(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::from(e).context(path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let mut table = Table::new(header);
    for (k, record) in r.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| field.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| {
                CliError::new(ExitKind::Data, anyhow::anyhow!("{}: row {}: {e}", path.display(), k + 1))
            })?;
        table.rows.push(row);
    }
    Ok(table)
}

/// A table whose first column holds labels, e.g. `problem,solver_a,solver_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTable {
    pub header: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_labeled_table(path: &Path) -> CliResult<LabeledTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::from(e).context(path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.len() < 2 {
        return Err(CliError::new(
            ExitKind::Data,
            anyhow::anyhow!("{}: expected a label column and at least one value column", path.display()),
        ));
    }
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record?;
        labels.push(record[0].to_owned());
        let row = record
            .iter()
            .skip(1)
            .map(|field| field.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| {
                CliError::new(ExitKind::Data, anyhow::anyhow!("{}: row {}: {e}", path.display(), k + 1))
            })?;
        rows.push(row);
    }
    Ok(LabeledTable { header, labels, rows })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::from(e).context(path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Creates `dir` if needed and returns the path of `name` inside it.
pub fn artifact(dir: &Path, name: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::from(e).context(dir.display()))?;
    Ok(dir.join(name))
}
