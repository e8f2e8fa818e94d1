//! Tabular reports rendered as aligned text, CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass" } else { "fail" }.into())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn float_text(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float_text(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if v.is_finite() => {
                Value::Number(Number::from_str(&float_text(*v)).expect("formatted float parses"))
            }
            Cell::Float(v) => Value::String(v.to_string()),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn csv(&self) -> String {
        let t = self.text();
        if t.contains([',', '"', '\n', '\r']) {
            format!("\"{}\"", t.replace('"', "\"\""))
        } else {
            t
        }
    }
}

/// A command's output: summary fields, an optional table and trailing
/// free-text lines shown only in text mode.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn field(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.into(), value.into()));
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) -> &mut Self {
        self.rows.push(cells);
        self
    }

    pub fn note(&mut self, line: impl Into<String>) -> &mut Self {
        self.notes.push(line.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k}: {}", v.text());
        }
        if !self.columns.is_empty() {
            let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
            let widths: Vec<usize> = (0..self.columns.len())
                .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |items: &[String]| {
                items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
            };
            let _ = writeln!(out, "{}", line(&self.columns));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        if self.columns.is_empty() {
            let _ = writeln!(out, "key,value");
            for (k, v) in &self.summary {
                let _ = writeln!(out, "{},{}", Cell::Text(k.clone()).csv(), v.csv());
            }
            return out;
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        }
        out
    }

    fn render_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("schema".into(), Value::from(1));
        obj.insert("command".into(), Value::String(self.command.clone()));
        for (k, v) in &self.summary {
            obj.insert(k.clone(), v.json());
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                .collect();
            obj.insert("rows".into(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes");
        s.push('\n');
        s
    }
}
