//! CSV and JSON rendering. Numbers in CSV carry 17 significant digits;
//! JSON uses the shortest representation that round-trips exactly.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Self::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Self::Num(v) => v.to_string(),
            Self::Int(v) => v.to_string(),
            Self::Bool(v) => v.to_string(),
        }
    }

    fn json(self) -> Value {
        match self {
            Self::Num(v) => Value::from(v),
            Self::Int(v) => Value::from(v),
            Self::Bool(v) => Value::from(v),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let records = self.rows.iter().map(|row| {
            let fields = self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json()));
            Value::Object(fields.collect::<Map<_, _>>())
        });
        Value::Array(records.collect())
    }
}

/// Renders `table`, with `summary` fields wrapped around the records in
/// JSON; in CSV the summary is not part of the table.
pub fn render(table: &Table, format: Format, summary: Option<Map<String, Value>>) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let value = match summary {
                None => table.to_json(),
                Some(mut fields) => {
                    fields.insert("records".into(), table.to_json());
                    Value::Object(fields)
                }
            };
            let mut text = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
            text.push('\n');
            text
        }
    }
}

pub fn write(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error| match path {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(format!("cannot write to stdout: {e}")),
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(io(e)),
                _ => Ok(()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["mu", "n", "ok"]);
        t.rows.push(vec![Cell::Num(0.1), Cell::Int(3), Cell::Bool(true)]);
        t.rows.push(vec![Cell::Num(1.0 / 3.0), Cell::Int(0), Cell::Bool(false)]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next(), Some("mu,n,ok"));
        assert!(csv.contains("1.0000000000000001e-1,3,true"));
        let back: f64 = csv.lines().nth(2).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
        let json: Value = serde_json::from_str(&render(&t, Format::Json, None)).unwrap();
        assert_eq!(json[1]["mu"].as_f64(), Some(1.0 / 3.0));
        assert_eq!(json[0]["ok"], Value::Bool(true));
    }
}
