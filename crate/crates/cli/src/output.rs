use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::{CliError, CliResult};

pub const CSV_VERSION_LINE: &str = "# adiagrover-csv v1";
pub const UNITS_LINE: &str =
    "# units: energies in epsilon (ising) or in the AKLT gap (aklt); times in inverse energy units";

/// One result row: text parameters plus finite real metrics.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunRecord {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
}

impl RunRecord {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), ..Self::default() }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    /// Looks `column` up among parameters, then metrics.
    pub fn field(&self, column: &str) -> CliResult<String> {
        if column == "experiment" {
            return Ok(self.experiment.clone());
        }
        if let Some(v) = self.parameters.get(column) {
            return Ok(v.clone());
        }
        match self.metrics.get(column) {
            Some(v) if v.is_finite() => Ok(format_real(*v)),
            Some(v) => Err(CliError::Numerical(adiagrover::Error::InvalidSpec(format!(
                "non-finite metric {column} = {v}"
            )))),
            None => Err(CliError::Config(format!("record lacks column '{column}'"))),
        }
    }
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e9)`.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e9).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Writes the version and units comments, a header row, then `records`.
pub fn write_csv(out: &mut dyn Write, columns: &[&str], records: &[RunRecord]) -> CliResult<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    writeln!(out, "{UNITS_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for r in records {
        let row = columns.iter().map(|c| r.field(c)).collect::<CliResult<Vec<String>>>()?;
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
