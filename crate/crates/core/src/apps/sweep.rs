use serde::{Deserialize, Serialize};

use super::Hypergraph;

/// Result of the Cheeger sweep over sorted prefixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCut {
    /// Vertices sorted by `x_i / sqrt(W_ii)` descending, ties by index.
    pub order: Vec<usize>,
    /// Size of the chosen prefix `S_{j*}`.
    pub cut_index: usize,
    pub value: f64,
    /// `true` for vertices in `S_{j*}`.
    pub in_prefix: Vec<bool>,
}

impl SweepCut {
    /// Two-class labels: 0 for the prefix, 1 for its complement.
    pub fn labels(&self) -> Vec<usize> {
        self.in_prefix.iter().map(|&b| usize::from(!b)).collect()
    }
}

/// How the two incidence volumes of a cut combine in the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Balance {
    /// Smaller side, the usual balanced-cut ratio.
    #[default]
    Min,
    /// Larger side. Favors cutting off a single low-degree vertex.
    Max,
}

impl Balance {
    fn combine(self, a: usize, b: usize) -> usize {
        match self {
            Self::Min => a.min(b),
            Self::Max => a.max(b),
        }
    }
}

impl std::str::FromStr for Balance {
    type Err = crate::error::QdsfmError;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Self::Min),
            "max" => Ok(Self::Max),
            other => Err(crate::error::QdsfmError::InvalidInput(format!(
                "unknown balance '{other}' (expected min or max)"
            ))),
        }
    }
}

/// `c(S) = #{crossing hyperedges} / bal(sum_r |S_r ∩ S|, sum_r |S_r \ S|)`
pub fn sweep_value(hg: &Hypergraph, in_set: &[bool], balance: Balance) -> f64 {
    let mut crossing = 0usize;
    let mut vol_in = 0usize;
    let mut vol_out = 0usize;
    for e in &hg.hyperedges {
        let inside = e.members.iter().filter(|&&v| in_set[v]).count();
        vol_in += inside;
        vol_out += e.members.len() - inside;
        if inside > 0 && inside < e.members.len() {
            crossing += 1;
        }
    }
    let denom = balance.combine(vol_in, vol_out);
    if denom == 0 {
        if crossing == 0 { 0.0 } else { f64::INFINITY }
    } else {
        crossing as f64 / denom as f64
    }
}

/// [`cheeger_sweep_with`] using [`Balance::Min`].
pub fn cheeger_sweep(hg: &Hypergraph, w: &[f64], x: &[f64]) -> SweepCut {
    cheeger_sweep_with(hg, w, x, Balance::Min)
}

/// Scans the `N - 1` proper prefixes and returns the one minimizing
/// [`sweep_value`], the first on ties.
///
/// Runs in `O(sum_r |S_r| + N log N)` by tracking, per hyperedge, how many
/// members have entered the prefix.
pub fn cheeger_sweep_with(hg: &Hypergraph, w: &[f64], x: &[f64], balance: Balance) -> SweepCut {
    let n = hg.n;
    assert_eq!(x.len(), n, "score vector length");
    assert_eq!(w.len(), n, "weight vector length");
    let score: Vec<f64> = x.iter().zip(w).map(|(x, w)| x / w.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| score[j].total_cmp(&score[i]).then(i.cmp(&j)));

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, e) in hg.hyperedges.iter().enumerate() {
        for &v in &e.members {
            incident[v].push(r);
        }
    }
    let sizes: Vec<usize> = hg.hyperedges.iter().map(|e| e.members.len()).collect();
    let total = hg.total_incidence();
    let mut entered = vec![0usize; hg.hyperedges.len()];
    let mut crossing = 0isize;
    let mut vol_in = 0usize;

    let mut best = (f64::INFINITY, 0);
    for (j, &v) in order.iter().enumerate().take(n.saturating_sub(1)) {
        for &r in &incident[v] {
            let before = entered[r];
            entered[r] += 1;
            vol_in += 1;
            if before == 0 && sizes[r] > 1 {
                crossing += 1;
            }
            if entered[r] == sizes[r] && sizes[r] > 1 {
                crossing -= 1;
            }
        }
        let denom = balance.combine(vol_in, total - vol_in);
        let value = if denom == 0 {
            if crossing == 0 { 0.0 } else { f64::INFINITY }
        } else {
            crossing as f64 / denom as f64
        };
        if value < best.0 {
            best = (value, j + 1);
        }
    }
    let (value, cut_index) = if best.0.is_finite() { best } else { (0.0, 0) };
    let mut in_prefix = vec![false; n];
    for &v in &order[..cut_index] {
        in_prefix[v] = true;
    }
    SweepCut {
        order,
        cut_index,
        value,
        in_prefix,
    }
}
