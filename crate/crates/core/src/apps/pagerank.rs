use serde::{Deserialize, Serialize};

use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::submodular::SubmodularAtom;
use crate::weights::WeightMatrix;

/// Undirected graph with unit edge weights. Parallel edges count twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// `(A D^-1 p)_i = sum_{j ~ i} p_j / d_j`
    pub fn walk(&self, p: &[f64]) -> Vec<f64> {
        let d = self.degrees();
        let mut out = vec![0.0; self.n];
        for &(i, j) in &self.edges {
            out[i] += p[j] / d[j] as f64;
            out[j] += p[i] / d[i] as f64;
        }
        out
    }
}

/// `p = D x`
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankTransform {
    pub degrees: Vec<f64>,
}

impl PagerankTransform {
    pub fn pagerank(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.degrees).map(|(x, d)| x * d).collect()
    }
}

/// Personalized PageRank with teleport vector `s` as QDSFM: `x = D^-1 p`,
/// `a = D^-1 s`, `W = (1 - alpha)/alpha D` and one unit edge atom per edge.
///
/// `alpha = 1` would make `W` vanish and is rejected.
pub fn build_pagerank_instance(
    graph: &Graph,
    alpha: f64,
    s: &[f64],
) -> Result<(ProblemInstance, PagerankTransform)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(QdsfmError::InvalidInput(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if s.len() != graph.n {
        return Err(QdsfmError::DimensionMismatch {
            expected: graph.n,
            got: s.len(),
        });
    }
    let mut atoms = Vec::with_capacity(graph.edges.len());
    for (index, &(i, j)) in graph.edges.iter().enumerate() {
        if i >= graph.n || j >= graph.n || i == j {
            return Err(QdsfmError::InvalidAtom {
                index,
                reason: format!("edge ({i}, {j}) is a self loop or out of range"),
            });
        }
        atoms.push(SubmodularAtom::edge(i, j, 1.0)?);
    }
    let degrees = graph.degrees();
    if let Some(v) = degrees.iter().position(|&d| d == 0) {
        return Err(QdsfmError::InvalidInput(format!("vertex {v} has degree 0")));
    }
    let d: Vec<f64> = degrees.into_iter().map(|d| d as f64).collect();
    let a = s.iter().zip(&d).map(|(s, d)| s / d).collect();
    let ratio = (1.0 - alpha) / alpha;
    let w = WeightMatrix::new(d.iter().map(|d| ratio * d).collect())?;
    let instance = ProblemInstance::new(a, w, atoms)?;
    Ok((instance, PagerankTransform { degrees: d }))
}

/// `||(1 - alpha) s + alpha A D^-1 p - p||_inf`
pub fn pagerank_residual(graph: &Graph, alpha: f64, s: &[f64], p: &[f64]) -> f64 {
    graph
        .walk(p)
        .iter()
        .zip(s.iter().zip(p))
        .map(|(ap, (s, p))| ((1.0 - alpha) * s + alpha * ap - p).abs())
        .fold(0.0, f64::max)
}
