//! Rendering of command results as aligned text, JSON or RFC 4180 CSV.

use std::io::Write;

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Exit status of a finished command.
pub mod code {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PRECISION: i32 = 2;
    pub const USAGE: i32 = 3;
}

/// Everything a subcommand produces. The table is what CSV and text show;
/// JSON carries the full structured result.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub code: i32,
}

impl Report {
    pub fn new(json: Value, header: &[&str]) -> Self {
        Report {
            json,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            code: code::OK,
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Raises the exit code; failures dominate precision exhaustion.
    pub fn escalate(&mut self, c: i32) {
        if c == code::CHECK_FAILED || (c == code::PRECISION && self.code == code::OK) {
            self.code = c;
        }
    }

    pub fn render(&self, fmt: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match fmt {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Text => {
                for n in &self.notes {
                    writeln!(out, "{n}")?;
                }
                if self.rows.is_empty() {
                    return Ok(());
                }
                let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
                for r in &self.rows {
                    for (i, c) in r.iter().enumerate() {
                        widths[i] = widths[i].max(c.len());
                    }
                }
                let line = |cells: &[String]| {
                    let parts: Vec<String> =
                        cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
                    parts.join("  ").trim_end().to_string()
                };
                writeln!(out, "{}", line(&self.header))?;
                for r in &self.rows {
                    writeln!(out, "{}", line(r))?;
                }
                Ok(())
            }
        }
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
