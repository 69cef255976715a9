//! Table emission. Every command renders a [`Table`] and serializes it as
//! CSV (stable documented header row) or JSON (array of objects with the
//! same column names). Reals are rounded to 12 significant digits before
//! emission, so the two formats carry identical values and reruns are
//! byte-identical.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}")
        .parse()
        .expect("scientific notation round-trips")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map(Cell::Float).unwrap_or(Cell::Empty)
    }
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

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
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

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.to_string(), json_value(cell));
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("tables serialize");
        s.push('\n');
        s
    }
}

fn csv_field(cell: &Cell) -> String {
    let raw = match cell {
        Cell::Float(x) => format!("{}", sig12(*x)),
        Cell::Int(x) => x.to_string(),
        Cell::Bool(x) => x.to_string(),
        Cell::Str(s) => s.clone(),
        Cell::Empty => String::new(),
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Float(x) => serde_json::Number::from_f64(sig12(*x))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Cell::Int(x) => json!(x),
        Cell::Bool(x) => json!(x),
        Cell::Str(s) => json!(s),
        Cell::Empty => Value::Null,
    }
}

/// Writes to the given path, or stdout when absent.
pub fn emit(out: Option<&Path>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_to_twelve_digits() {
        assert_eq!(sig12(0.5), 0.5);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(123456789.0), 123456789.0);
    }

    #[test]
    fn csv_and_json_carry_the_same_values() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![Cell::Float(1.0 / 3.0), Cell::Empty, Cell::Bool(true)]);
        let csv = t.render(Format::Csv);
        let json = t.render(Format::Json);

        let csv_val: f64 = csv
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed[0]["a"].as_f64().unwrap(), csv_val);
        assert!(parsed[0]["b"].is_null());
        assert_eq!(parsed[0]["c"], serde_json::Value::Bool(true));
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut t = Table::new(vec!["spec"]);
        t.push(vec![Cell::Str("case:2,0.3,0.1".into())]);
        let csv = t.render(Format::Csv);
        assert!(csv.contains("\"case:2,0.3,0.1\""));
    }
}
