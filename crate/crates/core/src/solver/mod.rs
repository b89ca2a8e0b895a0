//! Dual solvers for QDSFM.
//!
//! The dual problem is
//!
//! ```text
//! min_{(y_r, phi_r) in C_r}  g(y, phi) = ||sum_r y_r - 2 W a||_{W^-1}^2 + sum_r phi_r^2
//! ```
//!
//! with primal recovery `x = a - W^-1 sum_r y_r / 2` and dual value
//! `||a||_W^2 - g / 4`. [`rcd_solve`] does randomized coordinate descent over
//! the cones, [`ap_solve`] alternates between the product cone and the
//! hyperplane `sum_r lambda_r = 2 W a` in the `Psi W^-1` metric.

mod ap;
mod rcd;
mod trace;

pub use ap::{ap_solve, ApState};
pub use rcd::rcd_solve;
pub use trace::{ConvergenceTrace, TraceRecord};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::projection::{project, ConePoint, ProjectionMethod, ProjectionParams, ProjectionStatus};
use crate::submodular::SubmodularAtom;

/// All cone points plus the cached dense sum `sum_r y_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub cones: Vec<ConePoint>,
    pub sum_y: Vec<f64>,
}

impl DualState {
    pub fn zero(instance: &ProblemInstance) -> Self {
        Self {
            cones: instance
                .atoms()
                .iter()
                .map(|a| ConePoint::apex(a.len()))
                .collect(),
            sum_y: vec![0.0; instance.n()],
        }
    }

    /// Builds a state from cone points, computing `sum_y`.
    pub fn from_cones(instance: &ProblemInstance, cones: Vec<ConePoint>) -> Result<Self> {
        if cones.len() != instance.num_atoms() {
            return Err(QdsfmError::DimensionMismatch {
                expected: instance.num_atoms(),
                got: cones.len(),
            });
        }
        for (index, (atom, cone)) in instance.atoms().iter().zip(&cones).enumerate() {
            if cone.y.len() != atom.len() {
                return Err(QdsfmError::InvalidAtom {
                    index,
                    reason: format!(
                        "cone point has {} coordinates, atom has {} members",
                        cone.y.len(),
                        atom.len()
                    ),
                });
            }
        }
        let mut state = Self {
            cones,
            sum_y: vec![0.0; instance.n()],
        };
        state.resync(instance);
        Ok(state)
    }

    /// Recomputes `sum_y` from scratch.
    pub fn resync(&mut self, instance: &ProblemInstance) {
        self.sum_y.iter_mut().for_each(|v| *v = 0.0);
        for (atom, cone) in instance.atoms().iter().zip(&self.cones) {
            for (&i, &y) in atom.members().iter().zip(&cone.y) {
                self.sum_y[i] += y;
            }
        }
    }

    /// Replaces cone `r`, keeping `sum_y` in sync incrementally.
    pub(crate) fn replace(&mut self, atom: &SubmodularAtom, r: usize, point: ConePoint) {
        for ((&i, &old), &new) in atom.members().iter().zip(&self.cones[r].y).zip(&point.y) {
            self.sum_y[i] += new - old;
        }
        self.cones[r] = point;
    }
}

/// `||x - a||_W^2 + sum_r f_r(x)^2`
pub fn primal_objective(instance: &ProblemInstance, x: &[f64]) -> f64 {
    instance.primal_objective(x)
}

/// Returns `(g, Dval)` where `Dval = ||a||_W^2 - g/4`.
pub fn dual_objective(instance: &ProblemInstance, dual: &DualState) -> (f64, f64) {
    let w = instance.w().diag();
    let a = instance.a();
    let resid: f64 = dual
        .sum_y
        .iter()
        .zip(w.iter().zip(a))
        .map(|(s, (w, a))| {
            let d = s - 2.0 * w * a;
            d * d / w
        })
        .sum();
    let phi_sq: f64 = dual.cones.iter().map(|c| c.phi * c.phi).sum();
    let g = resid + phi_sq;
    (g, instance.w().norm_sq(a) - g / 4.0)
}

/// `x = a - W^-1 sum_y / 2`
pub fn primal_from_dual(instance: &ProblemInstance, dual: &DualState) -> Vec<f64> {
    instance
        .a()
        .iter()
        .zip(instance.w().diag().iter().zip(&dual.sum_y))
        .map(|(a, (w, s))| a - 0.5 * s / w)
        .collect()
}

/// Primal objective at the recovered `x` minus the dual value.
pub fn duality_gap(instance: &ProblemInstance, dual: &DualState) -> f64 {
    gap_parts(instance, dual).2
}

/// `(primal, dual value, gap)`
pub(crate) fn gap_parts(instance: &ProblemInstance, dual: &DualState) -> (f64, f64, f64) {
    let x = primal_from_dual(instance, dual);
    let primal = instance.primal_objective(&x);
    let (_, dval) = dual_objective(instance, dual);
    (primal, dval, primal - dval)
}

/// Which projection oracle each atom uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    /// Exact sweep for cut atoms, MNP for oracle atoms.
    #[default]
    Auto,
    Mnp,
    Fw,
    Exact,
}

impl std::str::FromStr for MethodChoice {
    type Err = QdsfmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            other => other.parse::<ProjectionMethod>().map(|m| match m {
                ProjectionMethod::Mnp => Self::Mnp,
                ProjectionMethod::Fw => Self::Fw,
                ProjectionMethod::Exact => Self::Exact,
            }),
        }
    }
}

impl std::fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Mnp => "mnp",
            Self::Fw => "fw",
            Self::Exact => "exact",
        })
    }
}

impl MethodChoice {
    pub fn resolve(self, atom: &SubmodularAtom) -> ProjectionMethod {
        match self {
            Self::Auto if atom.is_cut() => ProjectionMethod::Exact,
            Self::Auto | Self::Mnp => ProjectionMethod::Mnp,
            Self::Fw => ProjectionMethod::Fw,
            Self::Exact => ProjectionMethod::Exact,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub seed: u64,
    /// Iterations for RCD (one projection each) or AP (one sweep each).
    pub max_iters: u64,
    pub max_time: Option<Duration>,
    /// Stop once a checkpoint reports a gap at or below this value.
    pub target_gap: Option<f64>,
    /// Iterations between checkpoints; `None` uses `R` for RCD and 1 for AP.
    pub stride: Option<u64>,
    pub method: MethodChoice,
    pub delta: f64,
    /// Per-projection cap override; `None` keeps the method defaults.
    pub max_projection_iters: Option<usize>,
    /// Worker threads for the AP projections; 1 runs them inline.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0x5EED_0DF5_u64,
            max_iters: 100_000,
            max_time: None,
            target_gap: None,
            stride: None,
            method: MethodChoice::Auto,
            delta: 1e-12,
            max_projection_iters: None,
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub(crate) fn validate(&self, instance: &ProblemInstance) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(QdsfmError::InvalidInput("delta must be positive".into()));
        }
        if self.stride == Some(0) {
            return Err(QdsfmError::InvalidInput("checkpoint stride must be positive".into()));
        }
        if self.threads == 0 {
            return Err(QdsfmError::InvalidInput("thread count must be positive".into()));
        }
        if let Some(g) = self.target_gap {
            if !(g >= 0.0) {
                return Err(QdsfmError::InvalidInput(format!("target gap {g} is invalid")));
            }
        }
        for (index, atom) in instance.atoms().iter().enumerate() {
            if self.method.resolve(atom) == ProjectionMethod::Exact && !atom.is_cut() {
                return Err(QdsfmError::InvalidAtom {
                    index,
                    reason: "exact projection is only available for edge and hyperedge atoms".into(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn projection_params(&self, atom: &SubmodularAtom) -> ProjectionParams {
        ProjectionParams {
            delta: self.delta,
            max_major: self.max_projection_iters,
            method: self.method.resolve(atom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetGap,
    IterationBudget,
    TimeBudget,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub dual: DualState,
    pub trace: ConvergenceTrace,
    pub iterations: u64,
    pub gap: f64,
    pub converged: bool,
    pub stop: StopReason,
    /// Projections that ended on their iteration cap.
    pub inexact_projections: u64,
    pub seconds: f64,
}

/// Gap below which an unbudgeted run counts as converged.
pub const CONVERGED_GAP: f64 = 1e-9;

/// Checkpointing and stopping logic shared by both solvers.
pub(crate) struct Monitor {
    start: Instant,
    trace: ConvergenceTrace,
    target: Option<f64>,
    max_time: Option<Duration>,
    last_gap: f64,
    last_iter: Option<u64>,
}

impl Monitor {
    pub(crate) fn new(config: &SolverConfig, stride: u64) -> Self {
        Self {
            start: Instant::now(),
            trace: ConvergenceTrace::new(stride),
            target: config.target_gap,
            max_time: config.max_time,
            last_gap: f64::INFINITY,
            last_iter: None,
        }
    }

    pub(crate) fn stride(&self) -> u64 {
        self.trace.stride
    }

    /// Records a checkpoint and reports whether the target gap is met.
    pub(crate) fn checkpoint(&mut self, instance: &ProblemInstance, dual: &DualState, iter: u64) -> bool {
        if self.last_iter == Some(iter) {
            return self.target.is_some_and(|t| self.last_gap <= t);
        }
        let (primal, dval, gap) = gap_parts(instance, dual);
        self.trace.push(TraceRecord {
            iter,
            primal,
            dual: dval,
            gap,
            seconds: self.start.elapsed().as_secs_f64(),
        });
        self.last_gap = gap;
        self.last_iter = Some(iter);
        self.target.is_some_and(|t| gap <= t)
    }

    pub(crate) fn out_of_time(&self) -> bool {
        self.max_time.is_some_and(|t| self.start.elapsed() >= t)
    }

    pub(crate) fn finish(
        self,
        instance: &ProblemInstance,
        dual: DualState,
        iterations: u64,
        stop: StopReason,
        inexact_projections: u64,
    ) -> SolveResult {
        let gap = self.last_gap;
        let converged = gap <= self.target.unwrap_or(CONVERGED_GAP);
        if !converged {
            log::warn!("solver stopped after {iterations} iterations with gap {gap:e} ({stop:?})");
        }
        SolveResult {
            x: primal_from_dual(instance, &dual),
            seconds: self.start.elapsed().as_secs_f64(),
            dual,
            trace: self.trace,
            iterations,
            gap,
            converged,
            stop,
            inexact_projections,
        }
    }
}

pub(crate) fn project_atom(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    target: &[f64],
    config: &SolverConfig,
) -> (ConePoint, bool) {
    let params = config.projection_params(atom);
    // inputs were validated up front; a failure here is a bug
    let p = project(atom, wtilde, target, &params).expect("projection on validated input");
    let exact = p.status != ProjectionStatus::IterationCap;
    (p.point, exact)
}
