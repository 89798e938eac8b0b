use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliResult;

/// Numeric output table; every command reduces to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// 17 significant digits, '.' separator, no grouping; `nan` for missing.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv(table: &Table, w: &mut dyn Write) -> CliResult<()> {
    writeln!(w, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    config: &'a RunConfig,
    version: &'a str,
}

pub fn write_json(table: &Table, config: &RunConfig, command: &str, w: &mut dyn Write) -> CliResult<()> {
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for (k, &v) in table.columns.iter().zip(row) {
                m.insert(k.clone(), if v.is_finite() { json!(v) } else { Value::Null });
            }
            Value::Object(m)
        })
        .collect();
    let meta = Metadata { command, config, version: env!("CARGO_PKG_VERSION") };
    serde_json::to_writer_pretty(&mut *w, &json!({ "metadata": meta, "records": records }))?;
    writeln!(w)?;
    Ok(())
}

pub fn write_table(table: &Table, config: &RunConfig, command: &str, w: &mut dyn Write) -> CliResult<()> {
    match config.format {
        Format::Csv => write_csv(table, w),
        Format::Json => write_json(table, config, command, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        let mut t = Table::new(&["t", "F"]);
        t.push(vec![-0.1, 1.0 / 3.0]);
        t.push(vec![1e-300, f64::NAN]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,F"));
        let back: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, vec![-0.1, 1.0 / 3.0]);
        assert!(text.ends_with("nan\n"));
    }
}
