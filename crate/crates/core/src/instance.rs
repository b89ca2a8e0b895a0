//! Problem instances `min ||x - a||_W^2 + sum_r f_r(x)^2`.

use crate::error::{QdsfmError, Result};
use crate::submodular::{lovasz_extension, SubmodularAtom};
use crate::weights::WeightMatrix;

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    n: usize,
    a: Vec<f64>,
    w: WeightMatrix,
    atoms: Vec<SubmodularAtom>,
}

impl ProblemInstance {
    pub fn new(a: Vec<f64>, w: WeightMatrix, atoms: Vec<SubmodularAtom>) -> Result<Self> {
        let n = a.len();
        if w.len() != n {
            return Err(QdsfmError::DimensionMismatch {
                expected: n,
                got: w.len(),
            });
        }
        if let Some((i, v)) = a.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(QdsfmError::InvalidInput(format!("a[{i}] = {v} is not finite")));
        }
        for (index, atom) in atoms.iter().enumerate() {
            if atom.max_index() >= n {
                return Err(QdsfmError::InvalidAtom {
                    index,
                    reason: format!(
                        "member {} is outside the ground set of size {n}",
                        atom.max_index()
                    ),
                });
            }
        }
        Ok(Self { n, a, w, atoms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn w(&self) -> &WeightMatrix {
        &self.w
    }

    pub fn atoms(&self) -> &[SubmodularAtom] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// `Psi_ii`, the number of atoms incident to each element.
    pub fn incidence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for atom in &self.atoms {
            for &i in atom.members() {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Elements incident to no atom; their solution is `x_i = a_i`.
    pub fn isolated(&self) -> Vec<usize> {
        self.incidence_counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_incidence(&self) -> usize {
        self.atoms.iter().map(|a| a.len()).sum()
    }

    /// `||x - a||_W^2 + sum_r f_r(x)^2`
    pub fn primal_objective(&self, x: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(&self.a).map(|(x, a)| x - a).collect();
        let reg: f64 = self
            .atoms
            .iter()
            .map(|atom| lovasz_extension(atom, x).powi(2))
            .sum();
        self.w.norm_sq(&diff) + reg
    }
}
