use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use qdsfm::solver::ConvergenceTrace;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_trace(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for record in trace.iter() {
        writer.serialize(record)?;
    }
    if trace.is_empty() {
        writer.write_record(["iter", "primal", "dual", "gap", "seconds"])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct CompareRow<'a> {
    pub method: &'a str,
    pub iter: u64,
    pub seconds: f64,
    pub gap: f64,
}

pub fn write_compare<W: Write>(writer: W, rows: &[CompareRow<'_>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(writer);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(["method", "iter", "seconds", "gap"])?;
    }
    writer.flush()?;
    Ok(())
}
