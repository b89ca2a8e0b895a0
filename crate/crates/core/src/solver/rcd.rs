//! Randomized coordinate descent over the product of cones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{project_atom, DualState, Monitor, SolveResult, SolverConfig, StopReason};
use crate::error::Result;
use crate::instance::ProblemInstance;

/// Each iteration picks `r` uniformly and replaces `(y_r, phi_r)` by the
/// projection of `2 W a - sum_{r' != r} y_r'` onto `C_r` in the `W^-1` norm.
pub fn rcd_solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveResult> {
    config.validate(instance)?;
    let atoms = instance.atoms();
    let num_atoms = atoms.len();
    let mut dual = DualState::zero(instance);
    let mut monitor = Monitor::new(config, config.stride.unwrap_or(num_atoms.max(1) as u64));
    if num_atoms == 0 || monitor.checkpoint(instance, &dual, 0) {
        return Ok(monitor.finish(instance, dual, 0, StopReason::TargetGap, 0));
    }

    let w = instance.w().diag();
    let a = instance.a();
    let w_inv: Vec<Vec<f64>> = atoms
        .iter()
        .map(|atom| atom.members().iter().map(|&i| 1.0 / w[i]).collect())
        .collect();
    let two_wa: Vec<Vec<f64>> = atoms
        .iter()
        .map(|atom| atom.members().iter().map(|&i| 2.0 * w[i] * a[i]).collect())
        .collect();
    let resync_every = ((instance.n() * num_atoms) as u64 / 10).max(1);
    let stride = monitor.stride();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut inexact = 0;
    let mut stop = StopReason::IterationBudget;
    let mut done = 0;
    let mut target = Vec::new();
    for k in 1..=config.max_iters {
        if monitor.out_of_time() {
            stop = StopReason::TimeBudget;
            break;
        }
        let r = rng.gen_range(0..num_atoms);
        let atom = &atoms[r];
        target.clear();
        target.extend(
            atom.members()
                .iter()
                .zip(&two_wa[r])
                .zip(&dual.cones[r].y)
                .map(|((&i, twa), y)| twa - (dual.sum_y[i] - y)),
        );
        let (point, exact) = project_atom(atom, &w_inv[r], &target, config);
        inexact += u64::from(!exact);
        dual.replace(atom, r, point);
        done = k;

        if k % resync_every == 0 {
            dual.resync(instance);
        }
        if k % stride == 0 && monitor.checkpoint(instance, &dual, k) {
            stop = StopReason::TargetGap;
            break;
        }
    }
    if monitor.checkpoint(instance, &dual, done) {
        stop = StopReason::TargetGap;
    }
    Ok(monitor.finish(instance, dual, done, stop, inexact))
}
