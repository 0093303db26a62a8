use qregion_core::{Error, Result};
use serde_json::ser::Formatter;
use serde_json::Value;
use std::io::{self, Write};

/// Fixed-point rendering with nine decimals; negative zero prints as zero.
pub fn fmt9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.9}");
    if s == "-0.000000000" {
        "0.000000000".into()
    } else {
        s
    }
}

/// JSON number, or a string for values JSON cannot represent.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(fmt9(x)))
}

struct NineDecimals;

impl Formatter for NineDecimals {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt9(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(fmt9(value as f64).as_bytes())
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt9(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

/// One command's result in all three output formats.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub table: Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        match format {
            Format::Text => {
                out.extend_from_slice(self.text.as_bytes());
                if !self.text.ends_with('\n') {
                    out.push(b'\n');
                }
            }
            Format::Json => {
                let mut ser = serde_json::Serializer::with_formatter(&mut out, NineDecimals);
                serde::Serialize::serialize(&self.json, &mut ser)
                    .map_err(|e| Error::InvalidInput(format!("JSON encoding failed: {e}")))?;
                out.push(b'\n');
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                let fail = |e: csv::Error| Error::InvalidInput(format!("CSV encoding failed: {e}"));
                w.write_record(&self.table.header).map_err(fail)?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(Cell::render)).map_err(fail)?;
                }
                w.flush()
                    .map_err(|e| Error::InvalidInput(format!("CSV encoding failed: {e}")))?;
            }
        }
        Ok(out)
    }
}
