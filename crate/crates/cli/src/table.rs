//! Tabular output: CSV and JSON emission plus CSV re-parsing.
//!
//! CSV convention: '.' decimal separator, floats at 12 significant
//! digits, mandatory header row. A report may hold several tables; in CSV
//! they are separated by exactly one blank line, in JSON they become one
//! object keyed by table name. No cell ever contains a comma, quote or
//! newline, so no quoting layer is needed.

use std::fmt::Write as _;

use anyhow::{bail, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    /// Infeasible or not-applicable entries stay empty, never zero.
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::json!(v),
            Cell::Float(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
            Cell::Bool(b) => serde_json::json!(b),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Formats a float with 12 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// A named table with a mandatory header row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl DataTable {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        DataTable {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Index of a named column.
    pub fn column(&self, header: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == header)
    }
}

/// An ordered set of tables forming one command's output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub tables: Vec<DataTable>,
}

impl Report {
    pub fn push(&mut self, table: DataTable) {
        self.tables.push(table);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            writeln!(out, "{}", table.headers.join(",")).unwrap();
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(Cell::render).collect();
                writeln!(out, "{}", line.join(",")).unwrap();
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut root = serde_json::Map::new();
        for table in &self.tables {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (h, cell) in table.headers.iter().zip(row) {
                        obj.insert(h.clone(), cell.to_json());
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            root.insert(table.name.clone(), serde_json::Value::Array(rows));
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap();
        text.push('\n');
        text
    }
}

/// Parses CSV emitted by [`Report::to_csv`] back into tables of text
/// cells. Table names are not stored in CSV and come back as `table<i>`.
pub fn parse_csv(text: &str) -> Result<Report> {
    let mut report = Report::default();
    for (i, block) in text.split("\n\n").enumerate() {
        let block = block.strip_suffix('\n').unwrap_or(block);
        if block.is_empty() {
            continue;
        }
        let mut lines = block.lines();
        let Some(header) = lines.next() else {
            bail!("table {i} is missing its header row");
        };
        let headers: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut table = DataTable {
            name: format!("table{i}"),
            headers: headers.clone(),
            rows: Vec::new(),
        };
        for line in lines {
            let cells: Vec<Cell> = line
                .split(',')
                .map(|s| {
                    if s.is_empty() {
                        Cell::Empty
                    } else {
                        Cell::Text(s.to_string())
                    }
                })
                .collect();
            if cells.len() != headers.len() {
                bail!(
                    "table {i} has a row with {} cells, expected {}",
                    cells.len(),
                    headers.len()
                );
            }
            table.rows.push(cells);
        }
        report.push(table);
    }
    Ok(report)
}
