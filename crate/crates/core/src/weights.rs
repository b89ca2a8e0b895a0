//! Positive diagonal weight matrices and the weighted norms built on them.

use crate::error::{QdsfmError, Result};

/// A positive diagonal matrix, stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    diag: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        for (index, &value) in diag.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(QdsfmError::NonPositiveWeight { index, value });
            }
        }
        Ok(Self { diag })
    }

    pub fn identity(n: usize) -> Self {
        Self { diag: vec![1.0; n] }
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Result<Self> {
        Self::new(vec![scale; n])
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn get(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn inverse(&self) -> Self {
        Self {
            diag: self.diag.iter().map(|w| 1.0 / w).collect(),
        }
    }

    pub fn sqrt(&self) -> Self {
        Self {
            diag: self.diag.iter().map(|w| w.sqrt()).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(self.diag.iter().map(|w| w * factor).collect())
    }

    /// Entrywise product with another positive diagonal.
    pub fn mul(&self, other: &WeightMatrix) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Restriction of the diagonal to the given coordinates.
    pub fn gather(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.diag[i]).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.diag.iter().zip(x).map(|(w, v)| w * v).collect()
    }

    /// `<x, y>_W = sum_i W_ii x_i y_i`
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        weighted_inner(&self.diag, x, y)
    }

    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        weighted_norm_sq(&self.diag, x)
    }

    /// `||x||_W = sqrt(sum_i W_ii x_i^2)`
    pub fn norm(&self, x: &[f64]) -> f64 {
        self.norm_sq(x).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn inverse_trace(&self) -> f64 {
        self.diag.iter().map(|w| 1.0 / w).sum()
    }
}

pub(crate) fn weighted_inner(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter().zip(x).zip(y).map(|((w, a), b)| w * a * b).sum()
}

pub(crate) fn weighted_norm_sq(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(w, v)| w * v * v).sum()
}
