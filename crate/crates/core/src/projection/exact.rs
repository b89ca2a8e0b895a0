//! Exact projection for (directed) hyperedge cuts.
//!
//! The cone projection with metric `Wt` is dual to the primal problem
//!
//! ```text
//! min_z ||z - b||_W^2 + f(z)^2,   W = Wt^-1,  b = W^-1 a / 2,
//! f(z) = sqrt(w) (max_{i in H} z_i - min_{j in T} z_j)_+
//! ```
//!
//! and the projection is recovered as `y = a - 2 W z`, `phi = 2 f(z)`.
//! The primal optimum clamps `z` to a top level `gamma` on the head and a
//! bottom level `delta` on the tail. Writing `t = gamma - delta`, both levels
//! are piecewise-linear in `t` between breakpoints where another head (tail)
//! element joins the clamped set, so a two-pointer sweep over the sorted
//! head values (descending) and tail values (ascending) finds the root of
//! `gamma(t) - delta(t) - t` exactly.

use super::{certificate, check_local, cone_objective, ConePoint, Projection, ProjectionStatus};
use crate::error::{QdsfmError, Result};
use crate::submodular::SubmodularAtom;

pub fn project_hyperedge_exact(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
) -> Result<Projection> {
    check_local(atom, wtilde, a)?;
    let (head, tail) = atom.head_tail().ok_or_else(|| {
        QdsfmError::InvalidInput("exact projection needs an edge or (directed) hyperedge atom".into())
    })?;
    let m = atom.len();
    let weight = atom.weight();

    let point = if weight == 0.0 || m < 2 {
        ConePoint::apex(m)
    } else {
        // ||z - b||_W^2 + w g(z)^2 = w (||z - b||_{W/w}^2 + g(z)^2)
        let primal: Vec<f64> = wtilde.iter().map(|wt| 1.0 / wt).collect();
        let scaled: Vec<f64> = primal.iter().map(|w| w / weight).collect();
        let b: Vec<f64> = wtilde.iter().zip(a).map(|(wt, a)| 0.5 * wt * a).collect();
        let (z, gap) = sweep_directed(&head, &tail, &scaled, &b);
        let y = a
            .iter()
            .zip(primal.iter().zip(&z))
            .map(|(a, (w, z))| a - 2.0 * w * z)
            .collect();
        ConePoint {
            y,
            phi: 2.0 * weight.sqrt() * gap,
        }
    };

    Ok(Projection {
        objective: cone_objective(wtilde, a, &point),
        certificate: certificate(atom, wtilde, a, &point),
        point,
        iterations: 1,
        status: ProjectionStatus::Converged,
    })
}

/// Solves `min_z ||z - b||_W^2 + (max_H z - min_T z)_+^2` and returns the
/// minimizer together with `(max_H z - min_T z)_+`.
///
/// `head` and `tail` are masks over positions of `b`; both must be nonempty.
pub fn sweep_directed(head: &[bool], tail: &[bool], w: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut heads: Vec<usize> = (0..b.len()).filter(|&i| head[i]).collect();
    let mut tails: Vec<usize> = (0..b.len()).filter(|&i| tail[i]).collect();
    assert!(!heads.is_empty() && !tails.is_empty(), "empty head or tail");
    heads.sort_by(|&i, &j| b[j].total_cmp(&b[i]).then(i.cmp(&j)));
    tails.sort_by(|&i, &j| b[i].total_cmp(&b[j]).then(i.cmp(&j)));

    if b[heads[0]] <= b[tails[0]] {
        return (b.to_vec(), 0.0);
    }

    // Clamped sets are heads[..kh] and tails[..kt]; on the current segment
    // gamma(t) = (sum_h - t) / w_h and delta(t) = (sum_t + t) / w_t.
    let (mut kh, mut kt) = (1, 1);
    let (mut wh, mut sh) = (w[heads[0]], w[heads[0]] * b[heads[0]]);
    let (mut wt, mut st) = (w[tails[0]], w[tails[0]] * b[tails[0]]);
    let t = loop {
        let t_star = (sh / wh - st / wt) / (1.0 / wh + 1.0 / wt + 1.0);
        let next_h = heads
            .get(kh)
            .map_or(f64::INFINITY, |&i| sh - wh * b[i]);
        let next_t = tails
            .get(kt)
            .map_or(f64::INFINITY, |&j| wt * b[j] - st);
        if t_star <= next_h.min(next_t) {
            break t_star;
        }
        if next_h <= next_t {
            let i = heads[kh];
            wh += w[i];
            sh += w[i] * b[i];
            kh += 1;
        } else {
            let j = tails[kt];
            wt += w[j];
            st += w[j] * b[j];
            kt += 1;
        }
    };
    let gamma = (sh - t) / wh;
    let delta = (st + t) / wt;

    let mut z = b.to_vec();
    for (i, z) in z.iter_mut().enumerate() {
        if head[i] {
            *z = z.min(gamma);
        }
        if tail[i] {
            *z = z.max(delta);
        }
    }
    (z, (gamma - delta).max(0.0))
}
