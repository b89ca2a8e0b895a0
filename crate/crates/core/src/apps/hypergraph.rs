use serde::{Deserialize, Serialize};

use crate::error::{QdsfmError, Result};
use crate::submodular::SubmodularAtom;

/// A hyperedge; `head`/`tail` turn it into a directed hyperedge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub members: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<usize>>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl Hyperedge {
    pub fn undirected(members: Vec<usize>) -> Self {
        Self {
            members,
            head: None,
            tail: None,
            weight: 1.0,
        }
    }

    pub fn to_atom(&self) -> Result<SubmodularAtom> {
        match (&self.head, &self.tail) {
            (None, None) => SubmodularAtom::hyperedge(self.members.clone(), self.weight),
            (Some(h), Some(t)) => {
                SubmodularAtom::directed_hyperedge(self.members.clone(), h.clone(), t.clone(), self.weight)
            }
            _ => Err(QdsfmError::InvalidInput(
                "directed hyperedges need both head and tail".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: usize,
    pub hyperedges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new(n: usize, hyperedges: Vec<Hyperedge>) -> Result<Self> {
        let hg = Self { n, hyperedges };
        hg.validate()?;
        Ok(hg)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, e) in self.hyperedges.iter().enumerate() {
            let bad = |reason: String| QdsfmError::InvalidAtom { index, reason };
            if e.members.is_empty() {
                return Err(bad("hyperedge has no members".into()));
            }
            if let Some(&v) = e.members.iter().find(|&&v| v >= self.n) {
                return Err(bad(format!("vertex {v} out of range for n = {}", self.n)));
            }
            for side in [&e.head, &e.tail].into_iter().flatten() {
                if let Some(v) = side.iter().find(|v| !e.members.contains(v)) {
                    return Err(bad(format!("head/tail vertex {v} is not a member")));
                }
            }
        }
        Ok(())
    }

    /// `d_i`: number of hyperedges containing `i`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.hyperedges {
            for &v in &e.members {
                d[v] += 1;
            }
        }
        d
    }

    pub fn total_incidence(&self) -> usize {
        self.hyperedges.iter().map(|e| e.members.len()).sum()
    }

    pub fn len(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    /// One cut atom per hyperedge with at least two members.
    pub fn atoms(&self) -> Result<Vec<SubmodularAtom>> {
        self.hyperedges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.members.len() >= 2)
            .map(|(index, e)| {
                e.to_atom().map_err(|err| QdsfmError::InvalidAtom {
                    index,
                    reason: err.to_string(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_follow_incidence() {
        let hg = Hypergraph::new(
            4,
            vec![Hyperedge::undirected(vec![0, 1, 2]), Hyperedge::undirected(vec![2, 3])],
        )
        .unwrap();
        assert_eq!(hg.degrees(), vec![1, 1, 2, 1]);
        assert_eq!(hg.total_incidence(), 5);
        assert_eq!(hg.atoms().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_hyperedges() {
        assert!(Hypergraph::new(2, vec![Hyperedge::undirected(vec![])]).is_err());
        assert!(Hypergraph::new(2, vec![Hyperedge::undirected(vec![0, 2])]).is_err());
        let e = Hyperedge {
            members: vec![0, 1],
            head: Some(vec![0]),
            tail: Some(vec![3]),
            weight: 1.0,
        };
        assert!(matches!(
            Hypergraph::new(4, vec![e]),
            Err(QdsfmError::InvalidAtom { index: 0, .. })
        ));
    }
}
