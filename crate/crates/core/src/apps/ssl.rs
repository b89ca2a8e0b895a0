use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Hypergraph;
use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::weights::WeightMatrix;

/// Partially labeled vertices of a hypergraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub n: usize,
    pub num_classes: usize,
    /// vertex -> class in `0..num_classes`
    pub labels: BTreeMap<usize, usize>,
}

impl LabeledDataset {
    pub fn new(n: usize, num_classes: usize, labels: BTreeMap<usize, usize>) -> Result<Self> {
        if num_classes < 2 {
            return Err(QdsfmError::InvalidInput(format!(
                "need at least two classes, got {num_classes}"
            )));
        }
        if let Some((&v, &k)) = labels.iter().find(|(&v, &k)| v >= n || k >= num_classes) {
            return Err(QdsfmError::InvalidInput(format!(
                "label {k} on vertex {v} is out of range (n = {n}, classes = {num_classes})"
            )));
        }
        Ok(Self {
            n,
            num_classes,
            labels,
        })
    }

    /// `a_i = +1` for class `k`, `-1` for other labeled vertices, `0` otherwise.
    pub fn indicator(&self, k: usize) -> Vec<f64> {
        let mut a = vec![0.0; self.n];
        for (&v, &c) in &self.labels {
            a[v] = if c == k { 1.0 } else { -1.0 };
        }
        a
    }

    /// Number of labeled vertices per class.
    pub fn observed_per_class(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &c in self.labels.values() {
            counts[c] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `W = D`, the vertex degrees.
    #[default]
    Degree,
    /// `W = I`
    Identity,
}

impl std::str::FromStr for Normalization {
    type Err = QdsfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "degree" => Ok(Self::Degree),
            "identity" => Ok(Self::Identity),
            other => Err(QdsfmError::InvalidInput(format!(
                "unknown normalization '{other}' (expected degree or identity)"
            ))),
        }
    }
}

/// Maps between the SSL variables `x` and the instance variables
/// `x' = W^-1/2 x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SslTransform {
    pub sqrt_w: Vec<f64>,
    pub beta: f64,
}

impl SslTransform {
    /// `x = W^1/2 x'`
    pub fn original(&self, x_prime: &[f64]) -> Vec<f64> {
        x_prime.iter().zip(&self.sqrt_w).map(|(x, s)| x * s).collect()
    }

    /// Classification scores `x_i / sqrt(W_ii)`, which are `x'` itself.
    pub fn scores(&self, x_prime: &[f64]) -> Vec<f64> {
        x_prime.to_vec()
    }

    /// `W` as a matrix.
    pub fn w(&self) -> WeightMatrix {
        WeightMatrix::new(self.sqrt_w.iter().map(|s| s * s).collect())
            .expect("weights validated on construction")
    }

    /// `beta ||x - a||^2 + sum_r max_{i,j in S_r} (x_i/sqrt(W_ii) - x_j/sqrt(W_jj))^2`
    pub fn objective(&self, hg: &Hypergraph, a: &[f64], x: &[f64]) -> f64 {
        let fit: f64 = x.iter().zip(a).map(|(x, a)| (x - a).powi(2)).sum();
        let reg: f64 = hg
            .hyperedges
            .iter()
            .map(|e| {
                let vals = e.members.iter().map(|&i| x[i] / self.sqrt_w[i]);
                let hi = vals.clone().fold(f64::NEG_INFINITY, f64::max);
                let lo = vals.fold(f64::INFINITY, f64::min);
                e.weight * (hi - lo).powi(2)
            })
            .sum();
        self.beta * fit + reg
    }
}

/// Builds the QDSFM instance for the class-`k` SSL problem. The instance
/// has `a' = W^-1/2 a`, weights `beta W` and one cut atom per hyperedge.
pub fn build_ssl_instance(
    hg: &Hypergraph,
    ds: &LabeledDataset,
    k: usize,
    beta: f64,
    normalization: Normalization,
) -> Result<(ProblemInstance, SslTransform)> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(QdsfmError::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    if ds.n != hg.n {
        return Err(QdsfmError::DimensionMismatch {
            expected: hg.n,
            got: ds.n,
        });
    }
    if k >= ds.num_classes {
        return Err(QdsfmError::InvalidInput(format!(
            "class {k} out of range for {} classes",
            ds.num_classes
        )));
    }
    hg.validate()?;
    let w: Vec<f64> = match normalization {
        Normalization::Identity => vec![1.0; hg.n],
        Normalization::Degree => {
            let d = hg.degrees();
            if let Some(v) = d.iter().position(|&d| d == 0) {
                return Err(QdsfmError::InvalidInput(format!(
                    "vertex {v} has degree 0; degree normalization needs every vertex covered"
                )));
            }
            d.into_iter().map(|d| d as f64).collect()
        }
    };
    let sqrt_w: Vec<f64> = w.iter().map(|w| w.sqrt()).collect();
    let a: Vec<f64> = ds
        .indicator(k)
        .iter()
        .zip(&sqrt_w)
        .map(|(a, s)| a / s)
        .collect();
    let weights = WeightMatrix::new(w.iter().map(|w| beta * w).collect())?;
    let instance = ProblemInstance::new(a, weights, hg.atoms()?)?;
    Ok((instance, SslTransform { sqrt_w, beta }))
}

/// `argmax_k scores[k][i]` per vertex, lowest class on ties.
pub fn argmax_labels(scores: &[Vec<f64>]) -> Vec<usize> {
    let n = scores.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            let mut best = 0;
            for k in 1..scores.len() {
                if scores[k][i] > scores[best][i] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Fraction of positions where `predicted` and `truth` differ.
pub fn classification_error(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len(), "label vectors differ in length");
    if truth.is_empty() {
        return 0.0;
    }
    let wrong = predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
    wrong as f64 / truth.len() as f64
}
