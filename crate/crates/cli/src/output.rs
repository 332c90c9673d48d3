use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use pmeflights::stats::VerifyReport;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => number(*v),
            Cell::U(v) => v.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::U(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

/// Rows of named columns plus the command, its parameters and the seed.
pub struct Table {
    pub command: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, params: Value, seed: Option<u64>, columns: &[&str]) -> Self {
        Self { command, params, seed, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(out, "{}", cells.join(","));
                }
                out
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
                let doc = json!({
                    "command": self.command,
                    "params": self.params,
                    "seed": self.seed,
                    "rows": rows,
                });
                pretty(&doc)
            }
        }
    }
}

pub fn reports(reports: &[VerifyReport], format: Format) -> String {
    match format {
        Format::Json => pretty(&serde_json::to_value(reports).expect("reports serialize")),
        Format::Csv => {
            let mut t = Table::new(
                "verify",
                Value::Null,
                None,
                &["check", "params", "value", "tolerance", "pass", "seed", "n_samples"],
            );
            for r in reports {
                let opt = |v: Option<u64>| v.map(Cell::U).unwrap_or(Cell::S(String::new()));
                t.rows.push(vec![
                    Cell::S(r.check.clone()),
                    Cell::S(r.params.to_string()),
                    Cell::F(r.value),
                    Cell::F(r.tolerance),
                    Cell::S(r.pass.to_string()),
                    opt(r.seed),
                    opt(r.n_samples),
                ]);
            }
            t.render(Format::Csv)
        }
    }
}

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e16)`.
fn number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
