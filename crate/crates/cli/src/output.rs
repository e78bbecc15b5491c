//! CSV and JSON emission. CSV numbers carry 12 significant digits and never
//! depend on the locale; JSON documents start with `"schema": "qel/1"` and
//! keep their keys in declaration order.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::Format;
use crate::CliError;

pub use qel_core::verify::SCHEMA;

/// Formats like C's `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // the exponent after rounding to 12 digits decides the notation
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g12(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // non-finite numbers have no JSON form
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Column-oriented result of the grid commands.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<String>) -> Self {
        Self { command, columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("command".into(), self.command.into());
        doc.insert("columns".into(), Value::Array(self.columns.iter().cloned().map(Value::String).collect()));
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

/// What a command produced.
pub enum Output {
    Table(Table),
    /// A single JSON record; CSV renders it as a one-row table of its scalar
    /// fields.
    Record(Value),
}

impl Output {
    pub fn record<T: Serialize>(value: &T) -> Result<Self, CliError> {
        Ok(Output::Record(serde_json::to_value(value).map_err(io_err)?))
    }

    fn default_format(&self) -> Format {
        match self {
            Output::Table(_) => Format::Csv,
            Output::Record(_) => Format::Json,
        }
    }

    pub fn render(&self, format: Option<Format>) -> Result<Vec<u8>, CliError> {
        match (self, format.unwrap_or(self.default_format())) {
            (Output::Table(t), Format::Csv) => t.to_csv(),
            (Output::Table(t), Format::Json) => json_bytes(&t.to_json()),
            (Output::Record(v), Format::Json) => json_bytes(v),
            (Output::Record(v), Format::Csv) => record_to_csv(v),
        }
    }
}

fn json_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(io_err)?;
    out.push(b'\n');
    Ok(out)
}

fn record_to_csv(v: &Value) -> Result<Vec<u8>, CliError> {
    let Value::Object(map) = v else {
        return Err(CliError::Usage("record is not an object".into()));
    };
    let mut cols = Vec::new();
    let mut cells = Vec::new();
    for (k, val) in map {
        let text = match val {
            Value::Number(n) => n.as_f64().map(fmt_g12).unwrap_or_else(|| n.to_string()),
            Value::String(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Null => String::new(),
            // nested values do not fit a flat row
            Value::Array(_) | Value::Object(_) => continue,
        };
        cols.push(k.clone());
        cells.push(text);
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&cols).map_err(io_err)?;
    w.write_record(&cells).map_err(io_err)?;
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(io_err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (1.0 / 1.8, "0.555555555556"),
            (-2.5e-7, "-2.5e-07"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (13.180926, "13.180926"),
            (9.9999999999999, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g12(x), want, "{x}");
        }
    }

    #[test]
    fn table_csv_has_empty_cells() {
        let mut t = Table::new("t", vec!["a".into(), "b".into()]);
        t.push(vec![Cell::Num(0.25), Cell::Empty]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\n0.25,\n");
    }

    #[test]
    fn table_json_keeps_column_order() {
        let mut t = Table::new("t", vec!["z".into(), "a".into()]);
        t.push(vec![Cell::Num(1.0), Cell::Bool(false)]);
        let s = serde_json::to_string(&t.to_json()).unwrap();
        assert!(s.starts_with(r#"{"schema":"qel/1","command":"t""#));
        assert!(s.contains(r#"{"z":1.0,"a":false}"#));
    }
}
