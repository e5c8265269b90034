use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::config::Format;

/// Rectangular numeric output with a fixed column contract.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// Appends a row; `at` names the grid point in the error if any value
    /// is not finite.
    pub fn push(&mut self, row: Vec<f64>, at: impl FnOnce() -> String) -> Result<()> {
        assert_eq!(row.len(), self.columns.len());
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            bail!("non-finite {} = {v} at {}", self.columns[i], at());
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write(&self, w: impl Write, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(&self.columns)?;
                for row in &self.rows {
                    out.write_record(row.iter().map(|v| v.to_string()))?;
                }
                out.flush()?;
            }
            Format::Json => write_json(w, self)?,
        }
        Ok(())
    }
}

pub fn write_json(mut w: impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Opens `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_with_location() {
        let mut t = Table::new(vec!["eBar", "T"]);
        t.push(vec![1.0, 0.5], || unreachable!()).unwrap();
        let err = t.push(vec![2.0, f64::NAN], || "eBar = 2".into()).unwrap_err();
        assert_eq!(err.to_string(), "non-finite T = NaN at eBar = 2");
    }

    #[test]
    fn csv_round_trips_exactly() {
        let mut t = Table::new(vec!["x"]);
        t.push(vec![0.1 + 0.2], String::new).unwrap();
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: f64 = text.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 0.1 + 0.2);
    }
}
