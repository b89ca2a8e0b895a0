//! Projections onto the cone `C = {(y, phi) : phi >= 0, y in phi B}` induced
//! by the base polytope of one atom:
//!
//! ```text
//! Pi_C(a) = argmin_{(y, phi) in C} ||y - a||_Wt^2 + phi^2
//! ```
//!
//! Three interchangeable oracles are provided: the conic minimum-norm-point
//! method ([`project_mnp`]), conic Frank-Wolfe ([`project_fw`]) and an exact
//! `O(m log m)` sweep for (directed) hyperedge cuts ([`project_hyperedge_exact`]).
//! Every routine works in the atom's local coordinates: `a` and the diagonal
//! `wtilde` are indexed by position in [`SubmodularAtom::members`].

mod exact;
mod fw;
mod mnp;

pub use exact::{project_hyperedge_exact, sweep_directed};
pub use fw::{project_fw, project_fw_traced};
pub use mnp::{affine_minimizer, project_mnp, project_mnp_traced, ActiveSetState, AffineSolution};

use serde::{Deserialize, Serialize};

use crate::error::{QdsfmError, Result};
use crate::submodular::SubmodularAtom;
use crate::weights::{weighted_inner, weighted_norm_sq};

/// A point `(y, phi)` of an atom's cone, `y` in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    pub y: Vec<f64>,
    pub phi: f64,
}

impl ConePoint {
    pub fn apex(m: usize) -> Self {
        Self {
            y: vec![0.0; m],
            phi: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    Mnp,
    Fw,
    Exact,
}

impl std::str::FromStr for ProjectionMethod {
    type Err = QdsfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mnp" => Ok(Self::Mnp),
            "fw" => Ok(Self::Fw),
            "exact" | "spe" => Ok(Self::Exact),
            other => Err(QdsfmError::InvalidInput(format!(
                "unknown projection method '{other}' (expected mnp, fw or exact)"
            ))),
        }
    }
}

impl std::fmt::Display for ProjectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Mnp => "mnp",
            Self::Fw => "fw",
            Self::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionParams {
    /// Termination tolerance on the optimality certificate.
    pub delta: f64,
    /// Cap on MAJOR loops (MNP) or iterations (FW); `None` picks
    /// `100 |S_r|` for MNP and `100 |S_r|^2` for FW.
    pub max_major: Option<usize>,
    pub method: ProjectionMethod,
}

impl Default for ProjectionParams {
    fn default() -> Self {
        Self {
            delta: 1e-12,
            max_major: None,
            method: ProjectionMethod::Mnp,
        }
    }
}

impl ProjectionParams {
    pub fn with_method(method: ProjectionMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(QdsfmError::InvalidInput(format!(
                "projection tolerance must be positive, got {}",
                self.delta
            )));
        }
        if self.max_major == Some(0) {
            return Err(QdsfmError::InvalidInput(
                "projection iteration cap must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn cap_for(&self, m: usize) -> usize {
        self.max_major.unwrap_or(match self.method {
            ProjectionMethod::Fw => 100 * m.max(1) * m.max(1),
            _ => 100 * m.max(1),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionStatus {
    /// The certificate reached `-delta`.
    Converged,
    /// No further floating-point progress was possible.
    Stalled,
    /// Iteration cap hit; best point so far returned.
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub point: ConePoint,
    /// `h(y, phi) = ||y - a||_Wt^2 + phi^2`
    pub objective: f64,
    /// `min_{q in B} <y - a, q>_Wt + phi`; nonnegative at the optimum.
    pub certificate: f64,
    pub iterations: usize,
    pub status: ProjectionStatus,
}

impl Projection {
    pub fn converged(&self) -> bool {
        self.status != ProjectionStatus::IterationCap
    }
}

/// `h(y, phi)`
pub fn cone_objective(wtilde: &[f64], a: &[f64], point: &ConePoint) -> f64 {
    let diff: Vec<f64> = point.y.iter().zip(a).map(|(y, a)| y - a).collect();
    weighted_norm_sq(wtilde, &diff) + point.phi * point.phi
}

/// `min_{q in B} <y - a, q>_Wt + phi`
pub fn certificate(atom: &SubmodularAtom, wtilde: &[f64], a: &[f64], point: &ConePoint) -> f64 {
    let c = gradient_direction(wtilde, &point.y, a);
    let q = atom.greedy_local(&c);
    q.iter().zip(&c).map(|(q, c)| q * c).sum::<f64>() + point.phi
}

/// Linear cost `Wt (y - a)` whose greedy minimizer is the FW/MNP direction.
pub(crate) fn gradient_direction(wtilde: &[f64], y: &[f64], a: &[f64]) -> Vec<f64> {
    wtilde
        .iter()
        .zip(y.iter().zip(a))
        .map(|(w, (y, a))| w * (y - a))
        .collect()
}

pub(crate) fn check_local(atom: &SubmodularAtom, wtilde: &[f64], a: &[f64]) -> Result<()> {
    let m = atom.len();
    for len in [wtilde.len(), a.len()] {
        if len != m {
            return Err(QdsfmError::DimensionMismatch {
                expected: m,
                got: len,
            });
        }
    }
    if let Some((index, &value)) = wtilde
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(QdsfmError::NonPositiveWeight { index, value });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(QdsfmError::InvalidInput("projection target is not finite".into()));
    }
    Ok(())
}

/// Dispatches on `params.method`.
pub fn project(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
    params: &ProjectionParams,
) -> Result<Projection> {
    match params.method {
        ProjectionMethod::Mnp => project_mnp(atom, wtilde, a, params),
        ProjectionMethod::Fw => project_fw(atom, wtilde, a, params),
        ProjectionMethod::Exact => project_hyperedge_exact(atom, wtilde, a),
    }
}

pub(crate) fn inner(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    weighted_inner(w, x, y)
}
