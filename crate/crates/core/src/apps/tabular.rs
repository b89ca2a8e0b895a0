use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Hyperedge, Hypergraph};
use crate::error::{QdsfmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// Columns to turn into hyperedges. Data columns not listed are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinningRule {
    /// Equal-width bins over `[min, max]`.
    #[default]
    EqualWidth,
    /// Bins holding (as nearly as ties allow) equally many rows.
    EqualFrequency,
}

const BINS: usize = 10;

/// Cells treated as missing; a missing cell joins no hyperedge.
fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c == "?"
}

/// One hyperedge per (categorical column, value) and per (numeric column,
/// bin); rows are vertices and groups with fewer than two rows are dropped.
pub fn ingest_tabular_dataset(
    header: &[String],
    rows: &[Vec<String>],
    schema: &Schema,
    binning: BinningRule,
) -> Result<Hypergraph> {
    let n = rows.len();
    let mut hyperedges = Vec::new();
    for spec in &schema.columns {
        let col = header
            .iter()
            .position(|h| h.trim() == spec.name)
            .ok_or_else(|| QdsfmError::Parse(format!("column '{}' not found in header", spec.name)))?;
        let cells = rows.iter().enumerate().map(|(i, row)| {
            row.get(col)
                .map(String::as_str)
                .ok_or_else(|| QdsfmError::Parse(format!("row {i} has no column '{}'", spec.name)))
        });
        let groups: BTreeMap<String, Vec<usize>> = match spec.kind {
            ColumnKind::Categorical => {
                let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
                for (i, cell) in cells.enumerate() {
                    let cell = cell?;
                    if !is_missing(cell) {
                        groups.entry(cell.trim().to_string()).or_default().push(i);
                    }
                }
                groups
            }
            ColumnKind::Numeric => {
                let mut values = Vec::new();
                for (i, cell) in cells.enumerate() {
                    let cell = cell?;
                    if is_missing(cell) {
                        continue;
                    }
                    let v: f64 = cell.trim().parse().map_err(|_| {
                        QdsfmError::Parse(format!(
                            "row {i}, column '{}': '{cell}' is not a number",
                            spec.name
                        ))
                    })?;
                    if !v.is_finite() {
                        return Err(QdsfmError::Parse(format!(
                            "row {i}, column '{}': value is not finite",
                            spec.name
                        )));
                    }
                    values.push((i, v));
                }
                let bins = bin_values(&values, binning);
                if bins.len() == 1 {
                    log::info!("numeric column '{}' is constant; dropped", spec.name);
                    continue;
                }
                bins.into_iter().map(|(b, v)| (format!("{b:02}"), v)).collect()
            }
        };
        for (value, members) in groups {
            if members.len() >= 2 {
                hyperedges.push(Hyperedge::undirected(members));
            } else {
                log::debug!("dropping singleton group {}={}", spec.name, value);
            }
        }
    }
    Hypergraph::new(n, hyperedges)
}

fn bin_values(values: &[(usize, f64)], rule: BinningRule) -> BTreeMap<usize, Vec<usize>> {
    let mut bins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    if values.is_empty() {
        return bins;
    }
    match rule {
        BinningRule::EqualWidth => {
            let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
            let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
            for &(i, v) in values {
                let b = if hi > lo {
                    (((v - lo) / (hi - lo)) * BINS as f64).floor() as usize
                } else {
                    0
                };
                bins.entry(b.min(BINS - 1)).or_default().push(i);
            }
        }
        BinningRule::EqualFrequency => {
            let mut sorted: Vec<(usize, f64)> = values.to_vec();
            sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            let m = sorted.len();
            let mut first_rank = 0;
            for (rank, &(i, v)) in sorted.iter().enumerate() {
                if rank > 0 && v != sorted[rank - 1].1 {
                    first_rank = rank;
                }
                bins.entry(first_rank * BINS / m).or_default().push(i);
            }
        }
    }
    for members in bins.values_mut() {
        members.sort_unstable();
    }
    bins
}
