use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Value};

use heunqp_core::verify::Summary;

use crate::commands::C;
use crate::config::{Command, Format};

pub const SCHEMA_VERSION: u32 = 1;

/// Flat view of the records for CSV and text output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Extra line shown after the table in text output only.
    pub fn note(&mut self, line: String) {
        self.notes.push(line);
    }
}

pub struct Output {
    command: Command,
    records: Value,
    summary: Option<Summary>,
    extra: Option<Value>,
    table: Table,
}

impl Output {
    pub fn new<T: Serialize>(command: Command, records: &[T], table: Table) -> Result<Self> {
        Ok(Output {
            command,
            records: serde_json::to_value(records)?,
            summary: None,
            extra: None,
            table,
        })
    }

    pub fn with_summary(mut self, summary: Summary) -> Self {
        self.summary = Some(summary);
        self
    }

    /// Top-level fields merged into the JSON envelope.
    pub fn with_extra(mut self, extra: Value) -> Self {
        self.extra = Some(extra);
        self
    }

    pub fn failed(&self) -> usize {
        self.summary.map_or(0, |s| s.failed)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => self.write_json(out),
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command.name(),
            "records": self.records,
        });
        if let Some(s) = &self.summary {
            doc["summary"] = serde_json::to_value(s)?;
        }
        if let Some(Value::Object(extra)) = &self.extra {
            for (k, v) in extra {
                doc[k] = v.clone();
            }
        }
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_text(&self, out: &mut dyn Write) -> Result<()> {
        let t = &self.table;
        let mut widths: Vec<usize> = t.header.iter().map(|h| h.chars().count()).collect();
        for row in &t.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(&t.header))?;
        writeln!(
            out,
            "{}",
            line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>())
        )?;
        for row in &t.rows {
            writeln!(out, "{}", line(row))?;
        }
        for n in &t.notes {
            writeln!(out, "{n}")?;
        }
        if let Some(s) = &self.summary {
            writeln!(out, "{} passed, {} failed, {} skipped", s.passed, s.failed, s.skipped)?;
        }
        Ok(())
    }
}

/// `re`, or `re+imi` when the imaginary part is nonzero.
pub fn fmt_c(z: C) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_c(C { re: 0.5, im: 0.0 }), "0.5");
        assert_eq!(fmt_c(C { re: 1.0, im: -2.5 }), "1-2.5i");
        assert_eq!(fmt_c(C { re: 0.0, im: 0.37 }), "0+0.37i");
    }
}
