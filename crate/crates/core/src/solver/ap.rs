//! Alternating projections between the product cone and the hyperplane
//! `sum_r lambda_r = 2 W a`, measured in `Psi W^-1`.

use rayon::prelude::*;

use super::{project_atom, DualState, Monitor, SolveResult, SolverConfig, StopReason};
use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::projection::ConePoint;

/// Dual state plus the hyperplane iterates.
#[derive(Debug, Clone)]
pub struct ApState {
    pub dual: DualState,
    /// `lambda_r` in the local coordinates of atom `r`.
    pub lambda: Vec<Vec<f64>>,
    /// Incidence counts `Psi_ii`.
    pub psi: Vec<usize>,
    /// `2 W^-1 sum_r y_r - 4 a` from the latest hyperplane step.
    pub alpha: Vec<f64>,
}

impl ApState {
    pub fn new(instance: &ProblemInstance) -> Self {
        let dual = DualState::zero(instance);
        Self {
            lambda: dual.cones.iter().map(|c| c.y.clone()).collect(),
            dual,
            psi: instance.incidence_counts(),
            alpha: vec![0.0; instance.n()],
        }
    }

    /// Computes `alpha` and every `lambda_r = y_r - A_r Psi^-1 W alpha / 2`.
    pub fn hyperplane_step(&mut self, instance: &ProblemInstance) {
        let w = instance.w().diag();
        let a = instance.a();
        for i in 0..self.alpha.len() {
            self.alpha[i] = 2.0 * self.dual.sum_y[i] / w[i] - 4.0 * a[i];
        }
        for ((lambda, cone), atom) in self
            .lambda
            .iter_mut()
            .zip(&self.dual.cones)
            .zip(instance.atoms())
        {
            for ((l, y), &i) in lambda.iter_mut().zip(&cone.y).zip(atom.members()) {
                *l = y - 0.5 * w[i] * self.alpha[i] / self.psi[i] as f64;
            }
        }
    }

    /// Dense `sum_r lambda_r`.
    pub fn lambda_sum(&self, instance: &ProblemInstance) -> Vec<f64> {
        let mut sum = vec![0.0; instance.n()];
        for (lambda, atom) in self.lambda.iter().zip(instance.atoms()) {
            for (l, &i) in lambda.iter().zip(atom.members()) {
                sum[i] += l;
            }
        }
        sum
    }
}

/// Each iteration takes one hyperplane step and then projects every
/// `lambda_r` onto `C_r` with metric `Psi W^-1`. With `config.threads > 1`
/// the projections run on a dedicated thread pool; results do not depend on
/// the thread count.
pub fn ap_solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveResult> {
    config.validate(instance)?;
    let atoms = instance.atoms();
    let mut state = ApState::new(instance);
    let mut monitor = Monitor::new(config, config.stride.unwrap_or(1));
    if atoms.is_empty() || monitor.checkpoint(instance, &state.dual, 0) {
        return Ok(monitor.finish(instance, state.dual, 0, StopReason::TargetGap, 0));
    }

    let w = instance.w().diag();
    let metric: Vec<Vec<f64>> = atoms
        .iter()
        .map(|atom| {
            atom.members()
                .iter()
                .map(|&i| state.psi[i] as f64 / w[i])
                .collect()
        })
        .collect();
    let pool = if config.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .map_err(|e| QdsfmError::InvalidInput(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let stride = monitor.stride();

    let mut inexact = 0;
    let mut stop = StopReason::IterationBudget;
    let mut done = 0;
    for k in 1..=config.max_iters {
        if monitor.out_of_time() {
            stop = StopReason::TimeBudget;
            break;
        }
        state.hyperplane_step(instance);
        let project_one = |r: usize| project_atom(&atoms[r], &metric[r], &state.lambda[r], config);
        let points: Vec<(ConePoint, bool)> = match &pool {
            Some(pool) => pool.install(|| (0..atoms.len()).into_par_iter().map(project_one).collect()),
            None => (0..atoms.len()).map(project_one).collect(),
        };
        for (cone, (point, exact)) in state.dual.cones.iter_mut().zip(points) {
            inexact += u64::from(!exact);
            *cone = point;
        }
        state.dual.resync(instance);
        done = k;
        if k % stride == 0 && monitor.checkpoint(instance, &state.dual, k) {
            stop = StopReason::TargetGap;
            break;
        }
    }
    if monitor.checkpoint(instance, &state.dual, done) {
        stop = StopReason::TargetGap;
    }
    Ok(monitor.finish(instance, state.dual, done, stop, inexact))
}
