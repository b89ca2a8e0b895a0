//! Conic Frank-Wolfe with a two-variable nonnegative line search.

use super::{
    certificate, check_local, cone_objective, gradient_direction, inner, ConePoint, Projection,
    ProjectionParams, ProjectionStatus,
};
use crate::error::Result;
use crate::submodular::SubmodularAtom;

pub fn project_fw(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
    params: &ProjectionParams,
) -> Result<Projection> {
    project_fw_traced(atom, wtilde, a, params).map(|(p, _)| p)
}

/// Returns the projection and `h(y^(k), phi^(k))` for `k = 0, 1, ...`.
pub fn project_fw_traced(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
    params: &ProjectionParams,
) -> Result<(Projection, Vec<f64>)> {
    params.validate()?;
    check_local(atom, wtilde, a)?;
    let m = atom.len();
    let cap = params.cap_for(m);
    let a_sq = inner(wtilde, a, a);

    let mut point = ConePoint::apex(m);
    let mut h = a_sq;
    let mut history = vec![h];
    let mut status = ProjectionStatus::IterationCap;
    let mut iterations = 0;

    while iterations < cap {
        let c = gradient_direction(wtilde, &point.y, a);
        let q = atom.greedy_local(&c);
        let cert = q.iter().zip(&c).map(|(q, c)| q * c).sum::<f64>() + point.phi;
        if cert >= -params.delta {
            status = ProjectionStatus::Converged;
            break;
        }
        let (g1, g2) = line_search(wtilde, a, &point, &q);
        for (y, q) in point.y.iter_mut().zip(&q) {
            *y = g1 * *y + g2 * q;
        }
        point.phi = g1 * point.phi + g2;
        h = cone_objective(wtilde, a, &point);
        history.push(h);
        iterations += 1;
    }

    let projection = Projection {
        certificate: certificate(atom, wtilde, a, &point),
        objective: h,
        point,
        iterations,
        status,
    };
    Ok((projection, history))
}

/// `argmin_{g1, g2 >= 0} h(g1 y + g2 q, g1 phi + g2)`.
///
/// The objective is `g^T M g - 2 b^T g + ||a||^2` with
/// `M = [[|y|^2 + phi^2, <y,q> + phi], [<y,q> + phi, |q|^2 + 1]]` and
/// `b = (<y,a>, <q,a>)`. Candidates are the unconstrained stationary point
/// (if feasible) and the two boundary minimizers.
pub(crate) fn line_search(wtilde: &[f64], a: &[f64], point: &ConePoint, q: &[f64]) -> (f64, f64) {
    let m11 = inner(wtilde, &point.y, &point.y) + point.phi * point.phi;
    let m12 = inner(wtilde, &point.y, q) + point.phi;
    let m22 = inner(wtilde, q, q) + 1.0;
    let b1 = inner(wtilde, &point.y, a);
    let b2 = inner(wtilde, q, a);
    let value = |g1: f64, g2: f64| {
        m11 * g1 * g1 + 2.0 * m12 * g1 * g2 + m22 * g2 * g2 - 2.0 * b1 * g1 - 2.0 * b2 * g2
    };

    let mut candidates = Vec::with_capacity(4);
    candidates.push((0.0, 0.0));
    candidates.push((0.0, (b2 / m22).max(0.0)));
    if m11 > 0.0 {
        candidates.push(((b1 / m11).max(0.0), 0.0));
        let det = m11 * m22 - m12 * m12;
        if det > 1e-14 * m11 * m22 {
            let g1 = (b1 * m22 - b2 * m12) / det;
            let g2 = (m11 * b2 - m12 * b1) / det;
            if g1 >= 0.0 && g2 >= 0.0 {
                candidates.push((g1, g2));
            }
        }
    }
    candidates
        .into_iter()
        .min_by(|x, y| value(x.0, x.1).total_cmp(&value(y.0, y.1)))
        .unwrap()
}
