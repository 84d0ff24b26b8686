//! Rendering of command results as plain text, CSV or JSON.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

/// Rounds to `precision` decimals, then keeps the shortest representation that
/// reads back to the rounded value.
pub fn round_to(x: f64, precision: usize) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.precision$}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A result set: a single record or a table of rows sharing the same columns.
#[derive(Debug, Clone)]
pub struct Output {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    record: bool,
}

impl Output {
    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Output {
            columns,
            rows: vec![row],
            record: true,
        }
    }

    pub fn table(columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        Output {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            record: false,
        }
    }

    pub fn write<W: Write>(&self, mut out: W, format: Format, precision: usize) -> io::Result<()> {
        match format {
            Format::Plain => self.write_plain(&mut out, precision),
            Format::Csv => self.write_csv(&mut out, precision),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(precision))?;
                writeln!(out)
            }
        }
    }

    fn text(cell: &Cell, precision: usize) -> String {
        match cell {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(x) => round_to(*x, precision).to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn write_plain<W: Write>(&self, out: &mut W, precision: usize) -> io::Result<()> {
        if self.record {
            let width = self.columns.iter().map(String::len).max().unwrap_or(0);
            for (name, cell) in self.columns.iter().zip(&self.rows[0]) {
                writeln!(out, "{name:<width$}  {}", Self::text(cell, precision))?;
            }
            return Ok(());
        }
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| Self::text(c, precision)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                body.iter()
                    .map(|r| r[j].len())
                    .chain([self.columns[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        // Numbers right-aligned, text left-aligned.
        let textual: Vec<bool> = (0..self.columns.len())
            .map(|j| self.rows.iter().any(|r| matches!(r[j], Cell::Text(_))))
            .collect();
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let w = widths[j];
                    if textual[j] {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.columns.iter().map(String::as_str).collect()))?;
        for r in &body {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv<W: Write>(&self, out: &mut W, precision: usize) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|c| Self::text(c, precision)))?;
        }
        w.flush()
    }

    fn to_json(&self, precision: usize) -> Value {
        let object = |row: &Vec<Cell>| {
            let map: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, c)| {
                    let v = match c {
                        Cell::Num(x) => {
                            serde_json::Number::from_f64(round_to(*x, precision)).map_or(Value::Null, Value::Number)
                        }
                        Cell::Int(n) => Value::from(*n),
                        Cell::Text(s) => Value::from(s.as_str()),
                        Cell::Missing => Value::Null,
                    };
                    (k.clone(), v)
                })
                .collect();
            Value::Object(map)
        };
        if self.record {
            object(&self.rows[0])
        } else {
            Value::Array(self.rows.iter().map(object).collect())
        }
    }
}
