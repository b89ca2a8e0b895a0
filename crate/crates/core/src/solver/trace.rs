use serde::{Deserialize, Serialize};

/// One checkpoint of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: u64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    /// Wall-clock seconds since the solve loop started.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub stride: u64,
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn new(stride: u64) -> Self {
        Self {
            stride,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter()
    }

    /// Gap at the first checkpoint with `iter >= k`.
    pub fn gap_at(&self, k: u64) -> Option<f64> {
        self.records.iter().find(|r| r.iter >= k).map(|r| r.gap)
    }

    /// Least-squares slope of `ln(gap)` against the iteration count over the
    /// records with `lo <= iter <= hi` and positive gap.
    pub fn log_gap_slope(&self, lo: u64, hi: u64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .records
            .iter()
            .filter(|r| r.iter >= lo && r.iter <= hi && r.gap > 0.0)
            .map(|r| (r.iter as f64, r.gap.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}
