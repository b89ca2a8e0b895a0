//! Conic minimum-norm-point method.

use nalgebra::{DMatrix, DVector};

use super::{
    certificate, check_local, cone_objective, gradient_direction, inner, ConePoint, Projection,
    ProjectionParams, ProjectionStatus,
};
use crate::error::Result;
use crate::submodular::SubmodularAtom;

/// Coefficients within this distance of zero are treated as zero.
const LAMBDA_SNAP: f64 = 1e-12;
/// Two greedy vertices closer than this (sup norm) are the same point.
const DUPLICATE_TOL: f64 = 1e-12;

/// Active set of base-polytope points with conic coefficients, plus the
/// cached combination `y = sum lambda_i q_i` and `phi = sum lambda_i`.
#[derive(Debug, Clone, Default)]
pub struct ActiveSetState {
    pub points: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
    pub y: Vec<f64>,
    pub phi: f64,
}

impl ActiveSetState {
    fn empty(m: usize) -> Self {
        Self {
            points: Vec::new(),
            lambda: Vec::new(),
            y: vec![0.0; m],
            phi: 0.0,
        }
    }

    /// Recomputes `y` and `phi` from the points and coefficients.
    pub fn refresh(&mut self) {
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for (q, &l) in self.points.iter().zip(&self.lambda) {
            for (y, q) in self.y.iter_mut().zip(q) {
                *y += l * q;
            }
        }
        self.phi = self.lambda.iter().sum();
    }

    /// Drops points whose coefficient is (numerically) zero.
    fn prune(&mut self) {
        let mut k = 0;
        while k < self.lambda.len() {
            if self.lambda[k] <= LAMBDA_SNAP {
                self.lambda.remove(k);
                self.points.remove(k);
            } else {
                k += 1;
            }
        }
    }

    fn contains(&self, q: &[f64]) -> bool {
        self.points.iter().any(|p| {
            p.iter()
                .zip(q)
                .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL)
        })
    }

    fn point(&self) -> ConePoint {
        ConePoint {
            y: self.y.clone(),
            phi: self.phi,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub alpha: Vec<f64>,
    /// `||(G + 11^T) alpha - v||`
    pub residual: f64,
    /// Set when the normal matrix was not positive definite and the
    /// least-norm solution was used.
    pub singular: bool,
}

/// Minimizes `||sum_i alpha_i q_i - a||_Wt^2 + (sum_i alpha_i)^2` over
/// unconstrained `alpha` by solving `(G + 11^T) alpha = v` with
/// `G_ij = <q_i, q_j>_Wt` and `v_i = <q_i, a>_Wt`.
pub fn affine_minimizer(points: &[Vec<f64>], wtilde: &[f64], a: &[f64]) -> AffineSolution {
    let k = points.len();
    if k == 0 {
        return AffineSolution {
            alpha: Vec::new(),
            residual: 0.0,
            singular: false,
        };
    }
    let mut gram = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let g = inner(wtilde, &points[i], &points[j]) + 1.0;
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let rhs = DVector::from_iterator(k, points.iter().map(|q| inner(wtilde, q, a)));
    let (alpha, singular) = match gram.clone().cholesky() {
        Some(chol) => (chol.solve(&rhs), false),
        None => {
            let eps = 1e-12 * gram.amax().max(1.0);
            let alpha = gram
                .clone()
                .svd(true, true)
                .solve(&rhs, eps)
                .unwrap_or_else(|_| DVector::zeros(k));
            (alpha, true)
        }
    };
    let residual = (&gram * &alpha - &rhs).norm();
    AffineSolution {
        alpha: alpha.iter().copied().collect(),
        residual,
        singular,
    }
}

pub fn project_mnp(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
    params: &ProjectionParams,
) -> Result<Projection> {
    project_mnp_traced(atom, wtilde, a, params).map(|(p, _)| p)
}

/// Like [`project_mnp`] but also returns `h` after initialization and after
/// every MAJOR loop.
pub fn project_mnp_traced(
    atom: &SubmodularAtom,
    wtilde: &[f64],
    a: &[f64],
    params: &ProjectionParams,
) -> Result<(Projection, Vec<f64>)> {
    params.validate()?;
    check_local(atom, wtilde, a)?;
    let m = atom.len();
    let cap = params.cap_for(m);

    // q_1 maximizes <a, q>_Wt; lambda_1 is the best scalar multiple, clamped at 0.
    let c0: Vec<f64> = wtilde.iter().zip(a).map(|(w, a)| -w * a).collect();
    let q1 = atom.greedy_local(&c0);
    let lambda1 = (inner(wtilde, a, &q1) / (1.0 + inner(wtilde, &q1, &q1))).max(0.0);
    let mut state = ActiveSetState::empty(m);
    state.points.push(q1);
    state.lambda.push(lambda1);
    state.prune();
    state.refresh();

    let mut h = cone_objective(wtilde, a, &state.point());
    let mut history = vec![h];
    let mut status = ProjectionStatus::IterationCap;
    let mut iterations = 0;

    while iterations < cap {
        let c = gradient_direction(wtilde, &state.y, a);
        let q = atom.greedy_local(&c);
        let cert = q.iter().zip(&c).map(|(q, c)| q * c).sum::<f64>() + state.phi;
        if cert >= -params.delta {
            status = ProjectionStatus::Converged;
            break;
        }
        if state.contains(&q) {
            status = ProjectionStatus::Stalled;
            break;
        }
        iterations += 1;
        let saved = state.clone();
        state.points.push(q);
        state.lambda.push(0.0);
        minor_loop(&mut state, wtilde, a);
        state.prune();
        state.refresh();

        let h_next = cone_objective(wtilde, a, &state.point());
        if h_next > h {
            // roundoff undid the step; keep the better iterate
            state = saved;
            status = ProjectionStatus::Stalled;
            break;
        }
        let stalled = h_next >= h;
        h = h_next;
        history.push(h);
        if stalled {
            status = ProjectionStatus::Stalled;
            break;
        }
    }

    let point = state.point();
    let projection = Projection {
        certificate: certificate(atom, wtilde, a, &point),
        objective: h,
        point,
        iterations,
        status,
    };
    Ok((projection, history))
}

fn minor_loop(state: &mut ActiveSetState, wtilde: &[f64], a: &[f64]) {
    // Each pass removes at least one point, so the loop is bounded.
    for _ in 0..=state.points.len() {
        let solution = affine_minimizer(&state.points, wtilde, a);
        let alpha = solution.alpha;
        if alpha.iter().all(|&v| v >= 0.0) {
            state.lambda = alpha;
            return;
        }
        // theta = min_{alpha_i < 0} lambda_i / (lambda_i - alpha_i), smallest index on ties
        let mut theta = f64::INFINITY;
        let mut hit = 0;
        for (i, (&l, &al)) in state.lambda.iter().zip(&alpha).enumerate() {
            if al < 0.0 {
                let t = l / (l - al);
                if t < theta {
                    theta = t;
                    hit = i;
                }
            }
        }
        for (l, al) in state.lambda.iter_mut().zip(&alpha) {
            *l = theta * al + (1.0 - theta) * *l;
        }
        state.lambda[hit] = 0.0;
        state.prune();
        if state.points.is_empty() {
            return;
        }
    }
}
