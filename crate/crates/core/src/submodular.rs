//! Submodular components `F_r`, their Lovász extensions and the greedy
//! linear-minimization oracle over base polytopes.
//!
//! An atom stores its incidence set `S_r` as a sorted list of ground-set
//! indices. All per-atom vectors (points of `B_r`, cone iterates) are kept in
//! *local* coordinates, i.e. indexed by position in that list. Elements
//! outside `S_r` never influence an atom.

use std::fmt;
use std::sync::Arc;

use crate::error::{QdsfmError, Result};

/// Largest incidence set for which exhaustive subset checks are allowed.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Evaluation callback over a local membership mask.
pub type SetFn = dyn Fn(&[bool]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum SetOracle {
    /// Values indexed by bitmask over local positions (bit `k` = `members[k]`).
    Table(Arc<Vec<f64>>),
    Callback(Arc<SetFn>),
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetOracle::Table(t) => write!(f, "Table(len={})", t.len()),
            SetOracle::Callback(_) => write!(f, "Callback"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum AtomKind {
    /// `F(S) = sqrt(w)` iff exactly one endpoint is in `S`.
    GraphEdge,
    /// `F(S) = sqrt(w)` iff `S` splits the hyperedge.
    Hyperedge,
    /// `F(S) = sqrt(w)` iff `S` meets the head and misses part of the tail.
    /// Head and tail are masks over local positions.
    DirectedHyperedge { head: Vec<bool>, tail: Vec<bool> },
    /// User supplied set function, scaled by `sqrt(w)`.
    Oracle(SetOracle),
}

#[derive(Debug, Clone)]
pub struct SubmodularAtom {
    members: Vec<usize>,
    weight: f64,
    kind: AtomKind,
}

fn check_weight(weight: f64) -> Result<()> {
    if weight.is_finite() && weight >= 0.0 {
        Ok(())
    } else {
        Err(QdsfmError::InvalidInput(format!(
            "atom weight must be finite and nonnegative, got {weight}"
        )))
    }
}

fn sorted_unique(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

impl SubmodularAtom {
    pub fn edge(i: usize, j: usize, weight: f64) -> Result<Self> {
        check_weight(weight)?;
        if i == j {
            return Err(QdsfmError::InvalidInput(format!(
                "edge endpoints must differ, got ({i}, {j})"
            )));
        }
        Ok(Self {
            members: vec![i.min(j), i.max(j)],
            weight,
            kind: AtomKind::GraphEdge,
        })
    }

    pub fn hyperedge(members: Vec<usize>, weight: f64) -> Result<Self> {
        check_weight(weight)?;
        let members = sorted_unique(members);
        if members.is_empty() {
            return Err(QdsfmError::InvalidInput("hyperedge has no members".into()));
        }
        Ok(Self {
            members,
            weight,
            kind: AtomKind::Hyperedge,
        })
    }

    /// Directed hyperedge over `members`; `head` and `tail` must be nonempty
    /// subsets of `members`. Passing an empty `members` uses `head ∪ tail`.
    pub fn directed_hyperedge(
        members: Vec<usize>,
        head: Vec<usize>,
        tail: Vec<usize>,
        weight: f64,
    ) -> Result<Self> {
        check_weight(weight)?;
        if head.is_empty() || tail.is_empty() {
            return Err(QdsfmError::InvalidInput(
                "directed hyperedge needs a nonempty head and tail".into(),
            ));
        }
        let members = if members.is_empty() {
            sorted_unique(head.iter().chain(tail.iter()).copied().collect())
        } else {
            sorted_unique(members)
        };
        let mask = |set: &[usize]| -> Result<Vec<bool>> {
            let mut m = vec![false; members.len()];
            for &v in set {
                let pos = members.binary_search(&v).map_err(|_| {
                    QdsfmError::InvalidInput(format!(
                        "head/tail element {v} is not a member of the hyperedge"
                    ))
                })?;
                m[pos] = true;
            }
            Ok(m)
        };
        let head = mask(&head)?;
        let tail = mask(&tail)?;
        Ok(Self {
            members,
            weight,
            kind: AtomKind::DirectedHyperedge { head, tail },
        })
    }

    /// Table-backed atom. `table[mask]` is the value of the subset whose bit
    /// `k` selects `members[k]` in the order given here (not necessarily
    /// sorted). The table must have `2^|members|` entries.
    pub fn from_table(members: Vec<usize>, table: Vec<f64>, weight: f64) -> Result<Self> {
        check_weight(weight)?;
        let m = members.len();
        if m == 0 {
            return Err(QdsfmError::InvalidInput("table atom has no members".into()));
        }
        if m > EXHAUSTIVE_LIMIT {
            return Err(QdsfmError::Capacity {
                size: m,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        if table.len() != 1 << m {
            return Err(QdsfmError::InvalidInput(format!(
                "table atom over {m} members needs {} values, got {}",
                1usize << m,
                table.len()
            )));
        }
        let sorted = sorted_unique(members.clone());
        if sorted.len() != m {
            return Err(QdsfmError::InvalidInput("table atom has repeated members".into()));
        }
        // bit k of the input mask refers to members[k]; remap to sorted positions.
        let pos: Vec<usize> = members
            .iter()
            .map(|v| sorted.binary_search(v).unwrap())
            .collect();
        let mut remapped = vec![0.0; table.len()];
        for (mask, &value) in table.iter().enumerate() {
            let mut local = 0usize;
            for (k, &p) in pos.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    local |= 1 << p;
                }
            }
            remapped[local] = value;
        }
        Ok(Self {
            members: sorted,
            weight,
            kind: AtomKind::Oracle(SetOracle::Table(Arc::new(remapped))),
        })
    }

    /// Callback-backed atom; the callback receives a mask over the sorted
    /// members. Submodularity, normalization and nonnegativity are trusted.
    pub fn from_fn<F>(members: Vec<usize>, weight: f64, f: F) -> Result<Self>
    where
        F: Fn(&[bool]) -> f64 + Send + Sync + 'static,
    {
        check_weight(weight)?;
        let members = sorted_unique(members);
        if members.is_empty() {
            return Err(QdsfmError::InvalidInput("oracle atom has no members".into()));
        }
        Ok(Self {
            members,
            weight,
            kind: AtomKind::Oracle(SetOracle::Callback(Arc::new(f))),
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn kind(&self) -> &AtomKind {
        &self.kind
    }

    /// `sqrt(w)`, the value of the cut-type atoms on a cut set.
    pub fn scale(&self) -> f64 {
        self.weight.sqrt()
    }

    /// True for the variants handled by the exact sweep projection.
    pub fn is_cut(&self) -> bool {
        !matches!(self.kind, AtomKind::Oracle(_))
    }

    /// Head and tail masks; the undirected variants use the full member set.
    pub fn head_tail(&self) -> Option<(Vec<bool>, Vec<bool>)> {
        match &self.kind {
            AtomKind::GraphEdge | AtomKind::Hyperedge => {
                let all = vec![true; self.len()];
                Some((all.clone(), all))
            }
            AtomKind::DirectedHyperedge { head, tail } => Some((head.clone(), tail.clone())),
            AtomKind::Oracle(_) => None,
        }
    }

    pub fn max_index(&self) -> usize {
        *self.members.last().unwrap_or(&0)
    }

    /// Position of a ground-set element in the member list.
    pub fn local_position(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    /// `F(S ∩ S_r)` for a mask over local positions.
    pub fn eval_local(&self, inside: &[bool]) -> f64 {
        debug_assert_eq!(inside.len(), self.len());
        let s = self.scale();
        match &self.kind {
            AtomKind::GraphEdge | AtomKind::Hyperedge => {
                let k = inside.iter().filter(|&&b| b).count();
                if k > 0 && k < inside.len() {
                    s
                } else {
                    0.0
                }
            }
            AtomKind::DirectedHyperedge { head, tail } => {
                let hits_head = head.iter().zip(inside).any(|(&h, &x)| h && x);
                let misses_tail = tail.iter().zip(inside).any(|(&t, &x)| t && !x);
                if hits_head && misses_tail {
                    s
                } else {
                    0.0
                }
            }
            AtomKind::Oracle(SetOracle::Table(table)) => {
                let mask = inside
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (k, &b)| if b { acc | 1 << k } else { acc });
                s * table[mask]
            }
            AtomKind::Oracle(SetOracle::Callback(f)) => s * f(inside),
        }
    }

    fn local_mask(&self, set: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.len()];
        for &v in set {
            if let Some(p) = self.local_position(v) {
                inside[p] = true;
            }
        }
        inside
    }

    /// Greedy vertex of `B_r` minimizing `<c, q>`, in local coordinates.
    /// `c` is indexed by local position; ties keep ascending index order.
    pub fn greedy_local(&self, c: &[f64]) -> Vec<f64> {
        let m = self.len();
        debug_assert_eq!(c.len(), m);
        let order = ascending_order(c);
        let s = self.scale();
        let mut q = vec![0.0; m];
        match &self.kind {
            AtomKind::GraphEdge | AtomKind::Hyperedge => {
                if m >= 2 {
                    q[order[0]] = s;
                    q[order[m - 1]] = -s;
                }
            }
            AtomKind::DirectedHyperedge { head, tail } => {
                let tail_total = tail.iter().filter(|&&t| t).count();
                let mut head_hit = false;
                let mut tail_in = 0;
                let mut prev = 0.0;
                for &p in &order {
                    head_hit |= head[p];
                    if tail[p] {
                        tail_in += 1;
                    }
                    let value = if head_hit && tail_in < tail_total { s } else { 0.0 };
                    q[p] = value - prev;
                    prev = value;
                }
            }
            AtomKind::Oracle(_) => {
                let mut inside = vec![false; m];
                let mut prev = 0.0;
                for &p in &order {
                    inside[p] = true;
                    let value = self.eval_local(&inside);
                    q[p] = value - prev;
                    prev = value;
                }
            }
        }
        q
    }

    /// Lovász extension on local coordinates.
    pub fn lovasz_local(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.len());
        let s = self.scale();
        match &self.kind {
            AtomKind::GraphEdge | AtomKind::Hyperedge => {
                let (lo, hi) = x
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    });
                if x.len() < 2 {
                    0.0
                } else {
                    s * (hi - lo)
                }
            }
            AtomKind::DirectedHyperedge { head, tail } => {
                let top = x
                    .iter()
                    .zip(head)
                    .filter(|(_, &h)| h)
                    .map(|(&v, _)| v)
                    .fold(f64::NEG_INFINITY, f64::max);
                let bottom = x
                    .iter()
                    .zip(tail)
                    .filter(|(_, &t)| t)
                    .map(|(&v, _)| v)
                    .fold(f64::INFINITY, f64::min);
                s * (top - bottom).max(0.0)
            }
            AtomKind::Oracle(_) => self.lovasz_sorted(x),
        }
    }

    /// Lovász extension through the sorted-prefix formula, valid for any
    /// variant. Used for oracles and as a cross-check for the closed forms.
    pub fn lovasz_sorted(&self, x: &[f64]) -> f64 {
        let m = self.len();
        let order = descending_order(x);
        let mut inside = vec![false; m];
        let mut total = 0.0;
        for k in 0..m {
            inside[order[k]] = true;
            let value = self.eval_local(&inside);
            let next = if k + 1 < m { x[order[k + 1]] } else { 0.0 };
            total += value * (x[order[k]] - next);
        }
        total
    }

    pub fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.members.iter().map(|&i| x[i]).collect()
    }

    /// Writes a local vector into a dense ground-set vector.
    pub fn scatter(&self, local: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&i, &v) in self.members.iter().zip(local) {
            out[i] = v;
        }
        out
    }

    /// Largest value `max_S F_r(S)`; exhaustive for oracle atoms.
    pub fn max_value(&self) -> Result<f64> {
        let s = self.scale();
        match &self.kind {
            AtomKind::GraphEdge | AtomKind::Hyperedge => Ok(if self.len() >= 2 { s } else { 0.0 }),
            AtomKind::DirectedHyperedge { head, tail } => {
                // S = {h} works iff some tail element differs from h.
                let heads: Vec<usize> = (0..self.len()).filter(|&p| head[p]).collect();
                let tails: Vec<usize> = (0..self.len()).filter(|&p| tail[p]).collect();
                let ok = heads.iter().any(|h| tails.iter().any(|t| t != h));
                Ok(if ok { s } else { 0.0 })
            }
            AtomKind::Oracle(_) => {
                let m = self.len();
                if m > EXHAUSTIVE_LIMIT {
                    return Err(QdsfmError::BoundUnavailable(format!(
                        "oracle atom over {m} elements is too large for exhaustive maximization"
                    )));
                }
                let mut best: f64 = 0.0;
                let mut inside = vec![false; m];
                for mask in 0..(1usize << m) {
                    for (k, b) in inside.iter_mut().enumerate() {
                        *b = mask >> k & 1 == 1;
                    }
                    best = best.max(self.eval_local(&inside));
                }
                Ok(best)
            }
        }
    }
}

pub(crate) fn ascending_order(c: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&i, &j| c[i].total_cmp(&c[j]));
    order
}

pub(crate) fn descending_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]));
    order
}

/// `F_r(S ∩ S_r)` for a set of ground-set indices.
pub fn evaluate(atom: &SubmodularAtom, set: &[usize]) -> f64 {
    atom.eval_local(&atom.local_mask(set))
}

/// Lovász extension `f_r(x)` of a dense ground-set vector.
pub fn lovasz_extension(atom: &SubmodularAtom, x: &[f64]) -> f64 {
    atom.lovasz_local(&atom.gather(x))
}

/// Greedy minimizer of `<c, q>` over `B_r`, returned as a dense vector that
/// is zero off `S_r`.
pub fn greedy_linear_minimizer(atom: &SubmodularAtom, c: &[f64]) -> Vec<f64> {
    atom.scatter(&atom.greedy_local(&atom.gather(c)), c.len())
}

/// Exhaustive membership test for `B_r`, restricted to `|S_r| <= 20`.
pub fn base_polytope_contains(atom: &SubmodularAtom, y: &[f64], tol: f64) -> Result<bool> {
    let m = atom.len();
    if m > EXHAUSTIVE_LIMIT {
        return Err(QdsfmError::Capacity {
            size: m,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let off_support = y
        .iter()
        .enumerate()
        .filter(|(i, _)| atom.local_position(*i).is_none())
        .any(|(_, &v)| v.abs() > tol);
    if off_support {
        return Ok(false);
    }
    Ok(local_contains(atom, &atom.gather(y), tol))
}

pub(crate) fn local_contains(atom: &SubmodularAtom, y: &[f64], tol: f64) -> bool {
    let m = atom.len();
    let mut inside = vec![false; m];
    for mask in 1..(1usize << m) {
        let mut total = 0.0;
        for (k, b) in inside.iter_mut().enumerate() {
            *b = mask >> k & 1 == 1;
            if *b {
                total += y[k];
            }
        }
        let value = atom.eval_local(&inside);
        if total > value + tol {
            return false;
        }
        if mask == (1 << m) - 1 && (total - value).abs() > tol {
            return false;
        }
    }
    true
}
