use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Shortest decimal string that round-trips to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::validation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::validation(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::validation(format!("csv: {e}"))
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::validation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
