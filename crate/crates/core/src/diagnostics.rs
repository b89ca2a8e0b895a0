//! Condition quantities that govern the linear rate of the dual solvers.

use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::submodular::SubmodularAtom;
use crate::weights::WeightMatrix;

/// Largest atom for which the vertex enumeration in [`exact_max_l1`] runs.
pub const VERTEX_ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticBounds {
    /// Upper bound on `rho^2 = sum_r max_{y_r in B_r} ||y_r||_1^2`.
    pub rho_sq_upper: f64,
    /// `mu(W1, W2)` evaluated with `rho_sq_upper`.
    pub mu: f64,
    /// `max_S F_r(S)` for each atom.
    pub atom_max: Vec<f64>,
}

/// `mu(W1, W2) = max{ tr(W1) tr(W2^-1), 9/4 rho^2 tr(W1) + 1 }`
pub fn mu(w1: &WeightMatrix, w2: &WeightMatrix, rho_sq: f64) -> f64 {
    let first = w1.trace() * w2.inverse_trace();
    let second = 2.25 * rho_sq * w1.trace() + 1.0;
    first.max(second)
}

/// Uses `||y_r||_1 <= 2 max_S F_r(S)` for every atom.
pub fn diagnostics(
    instance: &ProblemInstance,
    w1: &WeightMatrix,
    w2: &WeightMatrix,
) -> Result<DiagnosticBounds> {
    let n = instance.n();
    for w in [w1, w2] {
        if w.len() != n {
            return Err(QdsfmError::DimensionMismatch {
                expected: n,
                got: w.len(),
            });
        }
    }
    let atom_max = instance
        .atoms()
        .iter()
        .map(SubmodularAtom::max_value)
        .collect::<Result<Vec<_>>>()?;
    let rho_sq_upper = atom_max.iter().map(|m| (2.0 * m).powi(2)).sum();
    Ok(DiagnosticBounds {
        rho_sq_upper,
        mu: mu(w1, w2, rho_sq_upper),
        atom_max,
    })
}

/// Exact `max_{y in B_r} ||y||_1` by enumerating every greedy vertex.
/// The maximum of a convex function over a polytope sits at a vertex, and
/// every vertex of `B_r` is a greedy output for some ordering.
pub fn exact_max_l1(atom: &SubmodularAtom) -> Result<f64> {
    let m = atom.len();
    if m > VERTEX_ENUMERATION_LIMIT {
        return Err(QdsfmError::Capacity {
            size: m,
            limit: VERTEX_ENUMERATION_LIMIT,
        });
    }
    let mut best: f64 = 0.0;
    for_each_permutation(m, |perm| {
        let mut inside = vec![false; m];
        let mut prev = 0.0;
        let mut l1 = 0.0;
        for &p in perm {
            inside[p] = true;
            let value = atom.eval_local(&inside);
            l1 += (value - prev).abs();
            prev = value;
        }
        best = best.max(l1);
    });
    Ok(best)
}

/// Exact `rho^2` for instances whose atoms are all enumerable.
pub fn exact_rho_sq(instance: &ProblemInstance) -> Result<f64> {
    instance
        .atoms()
        .iter()
        .map(|a| exact_max_l1(a).map(|v| v * v))
        .sum()
}

fn for_each_permutation(m: usize, mut visit: impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    visit(&perm);
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
