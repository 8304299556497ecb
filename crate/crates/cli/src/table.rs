use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dat,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dat" => Ok(Format::Dat),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (dat, csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    fn plain(&self) -> String {
        match self {
            // shortest round-trip representation, so output is reproducible
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// A named-column table, the unit of every output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    /// Rejects NaN and infinities before anything is written.
    pub fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (cell, name) in row.iter().zip(&self.columns) {
                if matches!(cell, Cell::Num(x) if !x.is_finite()) {
                    return Err(CliError::NonFinite {
                        column: name.clone(),
                        row: i,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        self.check_finite()?;
        let mut out = String::new();
        match format {
            Format::Dat => {
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::plain).collect();
                    writeln!(out, "{}", line.join(" ")).expect("string write");
                }
            }
            Format::Csv => {
                writeln!(out, "{}", self.columns.join(",")).expect("string write");
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::plain).collect();
                    writeln!(out, "{}", line.join(",")).expect("string write");
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                out = serde_json::to_string_pretty(&rows).expect("json values");
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let text = self.render(format)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let mut t = Table::new(["x", "y"]);
        t.push(vec![1.5.into(), 2u32.into()]);
        assert_eq!(t.render(Format::Dat).unwrap(), "1.5e0 2\n");
        assert_eq!(t.render(Format::Csv).unwrap(), "x,y\n1.5e0,2\n");
        assert!(t.render(Format::Json).unwrap().contains("\"x\": 1.5"));
        t.push(vec![f64::NAN.into(), 0u32.into()]);
        assert!(matches!(t.render(Format::Dat), Err(CliError::NonFinite { row: 1, .. })));
    }
}
