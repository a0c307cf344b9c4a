//! CSV ingestion and serialization of sample-by-feature tables.
//!
//! Files are UTF-8, comma-delimited, with a header row. The default layout
//! puts samples on rows: the first header cell labels the id column, the
//! remaining header cells are feature/outcome names, and each body row is a
//! sample id followed by numeric values. The transposed layout
//! (samples-as-columns) is handled by the orientation flag. Values written
//! back use the shortest representation that round-trips exactly; `NA` marks
//! a missing value and loads as NaN.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    SamplesAsRows,
    SamplesAsColumns,
}

impl Default for Orientation {
    fn default() -> Self {
        Orientation::SamplesAsRows
    }
}

/// A numeric table with sample ids and column names, always stored
/// samples-by-columns in memory regardless of the file orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub values: Array2<f64>,
    pub sample_ids: Vec<String>,
    pub column_names: Vec<String>,
}

impl DataTable {
    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    /// Row indices with no missing value in any column.
    pub fn complete_rows(&self) -> Vec<usize> {
        (0..self.n_samples())
            .filter(|&i| self.values.row(i).iter().all(|v| !v.is_nan()))
            .collect()
    }
}

fn parse_cell(raw: &str, path: &str, line: usize, column: usize) -> Result<f64> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed == "NA" || trimmed == "NaN" || trimmed == "nan" {
        return Ok(f64::NAN);
    }
    trimmed.parse::<f64>().map_err(|_| Error::NonNumericCell {
        path: path.to_string(),
        line,
        column,
        value: raw.to_string(),
    })
}

fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::ParseError { path: display.clone(), line: 0, message: e.to_string() })?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ParseError {
            path: display.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    Ok(rows)
}

/// Loads a CSV table. Errors carry 1-based line numbers; a first line whose
/// body cells are all numeric is rejected as a missing header.
pub fn load_csv(path: &Path, orientation: Orientation) -> Result<DataTable> {
    let display = path.display().to_string();
    let rows = read_rows(path)?;
    if rows.is_empty() {
        return Err(Error::ParseError {
            path: display,
            line: 1,
            message: "empty file: missing header row".into(),
        });
    }
    let header = &rows[0];
    if header.len() < 2 {
        return Err(Error::ParseError {
            path: display,
            line: 1,
            message: "header row needs an id label and at least one name".into(),
        });
    }
    if header[1..].iter().all(|c| c.trim().parse::<f64>().is_ok()) {
        return Err(Error::ParseError {
            path: display,
            line: 1,
            message: "missing header row: first line is numeric data".into(),
        });
    }
    let width = header.len();
    let names: Vec<String> = header[1..].iter().map(|s| s.trim().to_string()).collect();

    let mut ids = Vec::with_capacity(rows.len() - 1);
    let mut body: Vec<Vec<f64>> = Vec::with_capacity(rows.len() - 1);
    for (offset, row) in rows[1..].iter().enumerate() {
        let line = offset + 2;
        if row.len() != width {
            return Err(Error::RaggedRows {
                path: display,
                line,
                expected: width,
                got: row.len(),
            });
        }
        ids.push(row[0].trim().to_string());
        let mut values = Vec::with_capacity(width - 1);
        for (c, cell) in row[1..].iter().enumerate() {
            values.push(parse_cell(cell, &display, line, c + 2)?);
        }
        body.push(values);
    }

    let (values, sample_ids, column_names) = match orientation {
        Orientation::SamplesAsRows => {
            let n = body.len();
            let p = width - 1;
            let mut m = Array2::<f64>::zeros((n, p));
            for (i, row) in body.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            (m, ids, names)
        }
        Orientation::SamplesAsColumns => {
            let n = width - 1;
            let p = body.len();
            let mut m = Array2::<f64>::zeros((n, p));
            for (j, row) in body.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            (m, names, ids)
        }
    };
    Ok(DataTable { values, sample_ids, column_names })
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        let mut s = String::new();
        write!(s, "{v}").expect("formatting a float cannot fail");
        s
    }
}

/// Writes a table back to CSV in the requested orientation. Finite values
/// round-trip exactly through `load_csv`.
pub fn save_csv(table: &DataTable, path: &Path, orientation: Orientation) -> Result<()> {
    let mut out = String::new();
    match orientation {
        Orientation::SamplesAsRows => {
            out.push_str("sample_id");
            for name in &table.column_names {
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
            for (i, id) in table.sample_ids.iter().enumerate() {
                out.push_str(id);
                for j in 0..table.n_columns() {
                    out.push(',');
                    out.push_str(&format_value(table.values[(i, j)]));
                }
                out.push('\n');
            }
        }
        Orientation::SamplesAsColumns => {
            out.push_str("feature");
            for id in &table.sample_ids {
                out.push(',');
                out.push_str(id);
            }
            out.push('\n');
            for j in 0..table.n_columns() {
                out.push_str(&table.column_names[j]);
                for i in 0..table.n_samples() {
                    out.push(',');
                    out.push_str(&format_value(table.values[(i, j)]));
                }
                out.push('\n');
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}
