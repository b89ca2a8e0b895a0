//! Brute-force reference implementations used as test oracles. None of them
//! call the library's greedy, projection or solver code; atoms are only used
//! through set-function evaluation.

#![allow(dead_code)]

use qdsfm::SubmodularAtom;
use rand::Rng;

/// All permutations of `0..m` (Heap's algorithm).
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..m).collect();
    let mut out = vec![p.clone()];
    let mut c = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `F(S)` for a subset of local positions given as a bitmask.
pub fn eval_mask(atom: &SubmodularAtom, mask: usize) -> f64 {
    let inside: Vec<bool> = (0..atom.len()).map(|k| mask >> k & 1 == 1).collect();
    atom.eval_local(&inside)
}

/// Distinct vertices of the base polytope, one per ordering of the ground set.
pub fn vertices(atom: &SubmodularAtom) -> Vec<Vec<f64>> {
    let m = atom.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for perm in permutations(m) {
        let mut q = vec![0.0; m];
        let mut mask = 0usize;
        let mut prev = 0.0;
        for &k in &perm {
            mask |= 1 << k;
            let cur = eval_mask(atom, mask);
            q[k] = cur - prev;
            prev = cur;
        }
        if !out
            .iter()
            .any(|v| v.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12))
        {
            out.push(q);
        }
    }
    out
}

/// Checks `y(S) <= F(S)` for every subset and `y(V) = F(V)`.
pub fn in_base_polytope(atom: &SubmodularAtom, y: &[f64], tol: f64) -> bool {
    let m = atom.len();
    for mask in 1..(1usize << m) {
        let ys: f64 = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| y[k]).sum();
        let f = eval_mask(atom, mask);
        if ys > f + tol {
            return false;
        }
        if mask == (1 << m) - 1 && (ys - f).abs() > tol {
            return false;
        }
    }
    true
}

/// `max_{q in B} <q, x>` over enumerated vertices.
pub fn lovasz_brute(atom: &SubmodularAtom, x: &[f64]) -> f64 {
    vertices(atom)
        .iter()
        .map(|q| q.iter().zip(x).map(|(q, x)| q * x).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max_{q in B} ||q||_Wt^2`
pub fn q_squared(atom: &SubmodularAtom, wtilde: &[f64]) -> f64 {
    vertices(atom)
        .iter()
        .map(|q| q.iter().zip(wtilde).map(|(q, w)| w * q * q).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense Gaussian elimination with partial pivoting. `None` if singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Optimal value of `min_{(y, phi) in C} ||y - a||_Wt^2 + phi^2` where the
/// cone is generated by `vertices`, computed by Lawson-Hanson NNLS on the
/// conic coefficients. Returns `(h*, y*, phi*)`.
pub fn cone_projection_nnls(
    vertices: &[Vec<f64>],
    wtilde: &[f64],
    a: &[f64],
) -> (f64, Vec<f64>, f64) {
    let k = vertices.len();
    let ip = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).zip(wtilde).map(|((x, y), w)| w * x * y).sum() };
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| ip(&vertices[i], &vertices[j]) + 1.0).collect())
        .collect();
    let rhs: Vec<f64> = vertices.iter().map(|q| ip(q, a)).collect();
    // gradient of the half objective: rhs - G lambda
    let grad = |lam: &[f64]| -> Vec<f64> {
        (0..k)
            .map(|i| rhs[i] - (0..k).map(|j| gram[i][j] * lam[j]).sum::<f64>())
            .collect()
    };
    let ls = |set: &[usize]| -> Vec<f64> {
        let sub: Vec<Vec<f64>> = set.iter().map(|&i| set.iter().map(|&j| gram[i][j]).collect()).collect();
        let b: Vec<f64> = set.iter().map(|&i| rhs[i]).collect();
        solve_dense(sub, b).expect("passive set stays linearly independent")
    };

    let mut lam = vec![0.0; k];
    let mut passive: Vec<usize> = Vec::new();
    for _outer in 0..10 * k + 10 {
        let w = grad(&lam);
        let cand = (0..k)
            .filter(|i| !passive.contains(i))
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match cand {
            Some(j) if w[j] > 1e-13 => passive.push(j),
            _ => break,
        }
        loop {
            let s = ls(&passive);
            if s.iter().all(|&v| v > 0.0) {
                for (&i, &v) in passive.iter().zip(&s) {
                    lam[i] = v;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&i, &v) in passive.iter().zip(&s) {
                if v <= 0.0 {
                    alpha = alpha.min(lam[i] / (lam[i] - v));
                }
            }
            for (&i, &v) in passive.iter().zip(&s) {
                lam[i] += alpha * (v - lam[i]);
            }
            passive.retain(|&i| lam[i] > 1e-15);
            for i in 0..k {
                if !passive.contains(&i) {
                    lam[i] = 0.0;
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }
    let m = a.len();
    let mut y = vec![0.0; m];
    for (q, l) in vertices.iter().zip(&lam) {
        for (y, q) in y.iter_mut().zip(q) {
            *y += l * q;
        }
    }
    let phi: f64 = lam.iter().sum();
    let h = y.iter().zip(a).zip(wtilde).map(|((y, a), w)| w * (y - a).powi(2)).sum::<f64>() + phi * phi;
    (h, y, phi)
}

/// Minimizes a function on a box by repeated grid search, shrinking the box
/// around the best grid point each round.
pub fn grid_minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    mut lo: Vec<f64>,
    mut hi: Vec<f64>,
    points: usize,
    rounds: usize,
) -> Vec<f64> {
    let d = lo.len();
    let mut best = lo.clone();
    for _ in 0..rounds {
        let step: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) / (points - 1) as f64).collect();
        let mut idx = vec![0usize; d];
        let mut best_val = f64::INFINITY;
        let mut x = vec![0.0; d];
        loop {
            for k in 0..d {
                x[k] = lo[k] + step[k] * idx[k] as f64;
            }
            let v = f(&x);
            if v < best_val {
                best_val = v;
                best.copy_from_slice(&x);
            }
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < points {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        for k in 0..d {
            lo[k] = best[k] - 3.0 * step[k];
            hi[k] = best[k] + 3.0 * step[k];
        }
    }
    best
}

/// `||x - a||_W^2 + sum_r w_r (max_{S_r} x - min_{S_r} x)^2` written out
/// directly for undirected hyperedges given as `(members, weight)`.
pub fn hyperedge_primal(a: &[f64], w: &[f64], edges: &[(Vec<usize>, f64)], x: &[f64]) -> f64 {
    let fit: f64 = x.iter().zip(a).zip(w).map(|((x, a), w)| w * (x - a).powi(2)).sum();
    let reg: f64 = edges
        .iter()
        .map(|(s, wr)| {
            let hi = s.iter().map(|&i| x[i]).fold(f64::NEG_INFINITY, f64::max);
            let lo = s.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
            wr * (hi - lo).powi(2)
        })
        .sum();
    fit + reg
}

/// Random subset of `0..n` with between `lo` and `hi` elements.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, lo: usize, hi: usize) -> Vec<usize> {
    let size = rng.gen_range(lo..=hi.min(n));
    let mut v = rand::seq::index::sample(rng, n, size).into_vec();
    v.sort_unstable();
    v
}

/// A random cut atom over `0..m`: edge, hyperedge or directed hyperedge.
pub fn random_cut_atom<R: Rng>(rng: &mut R, m: usize) -> SubmodularAtom {
    let members: Vec<usize> = (0..m).collect();
    let weight = rng.gen_range(0.2..3.0);
    match if m == 2 { rng.gen_range(0..3) } else { rng.gen_range(1..3) } {
        0 => SubmodularAtom::edge(0, 1, weight).unwrap(),
        1 => SubmodularAtom::hyperedge(members, weight).unwrap(),
        _ => {
            let head = random_subset(rng, m, 1, m);
            let tail = random_subset(rng, m, 1, m);
            SubmodularAtom::directed_hyperedge(members, head, tail, weight).unwrap()
        }
    }
}
