//! Tabular output shared by every command: `#`-prefixed metadata lines and a
//! header for CSV, or one object with `metadata`, `columns` and `rows` for
//! JSON. Floats are written with 17 significant digits so reruns are
//! byte-identical and values survive a round trip.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

use super::config::{OutputFormat, RunConfig};
use crate::error::{DiracError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => {
                Value::Number(format_float(*v).parse::<Number>().expect("formatted float is a JSON number"))
            }
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// `1.2345678901234567e-3`; NaN and infinities as `NaN`, `inf`, `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { metadata: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.metadata.push((key.into(), value.into()));
        self
    }

    /// Records constants, δ, tolerances and the tool version.
    pub fn run_metadata(&mut self, config: &RunConfig) -> &mut Self {
        let t = config.tolerances;
        self.meta("tool", "diracbound")
            .meta("version", env!("CARGO_PKG_VERSION"))
            .meta("alpha", config.constants.alpha)
            .meta("rest_energy_ev", config.constants.rest_energy)
            .meta("hbar_c_ev_nm", config.constants.hbar_c)
            .meta("delta", config.delta.value())
            .meta("tolerance_normalization", t.normalization)
            .meta("tolerance_singular_value", t.singular_value)
            .meta("tolerance_agreement", t.agreement)
            .meta("tolerance_expansion", t.expansion)
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn write(&self, format: OutputFormat, out: &mut impl Write) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("output is UTF-8")
    }

    fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {}", v.csv().replace('\n', " ")).map_err(io_error)?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_error)?;
        }
        w.flush().map_err(io_error)
    }

    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self.metadata.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let mut obj = Map::new();
        obj.insert("metadata".into(), Value::Object(metadata));
        obj.insert("columns".into(), Value::from(self.columns.clone()));
        obj.insert("rows".into(), Value::Array(rows));
        Value::Object(obj)
    }

    fn write_json(&self, out: &mut impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())
            .map_err(|e| DiracError::Domain(format!("json output: {e}")))?;
        writeln!(out).map_err(io_error)
    }
}

/// Splits a complex value into `(re, im)` cells.
pub fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Float(z.re), Cell::Float(z.im)]
}

fn io_error(e: std::io::Error) -> DiracError {
    DiracError::Domain(format!("write failed: {e}"))
}

fn csv_error(e: csv::Error) -> DiracError {
    DiracError::Domain(format!("csv output: {e}"))
}
