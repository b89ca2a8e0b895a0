//! JSON file formats shared by the library and the command-line tool.
//!
//! Vertex indices in every file are 0-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::apps::{Graph, LabeledDataset};
use crate::error::{QdsfmError, Result};
use crate::instance::ProblemInstance;
use crate::submodular::{AtomKind, SetOracle, SubmodularAtom};
use crate::weights::WeightMatrix;

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AtomSpec {
    Edge {
        members: [usize; 2],
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    Hyperedge {
        members: Vec<usize>,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    DirectedHyperedge {
        #[serde(default)]
        members: Vec<usize>,
        head: Vec<usize>,
        tail: Vec<usize>,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
    /// `table[mask]` is `F` of the subset selecting `members[k]` for each set
    /// bit `k`; `table[0]` must be 0.
    Table {
        members: Vec<usize>,
        table: Vec<f64>,
        #[serde(default = "unit_weight")]
        weight: f64,
    },
}

impl AtomSpec {
    pub fn to_atom(&self) -> Result<SubmodularAtom> {
        match self.clone() {
            Self::Edge { members, weight } => SubmodularAtom::edge(members[0], members[1], weight),
            Self::Hyperedge { members, weight } => SubmodularAtom::hyperedge(members, weight),
            Self::DirectedHyperedge {
                members,
                head,
                tail,
                weight,
            } => SubmodularAtom::directed_hyperedge(members, head, tail, weight),
            Self::Table {
                members,
                table,
                weight,
            } => SubmodularAtom::from_table(members, table, weight),
        }
    }

    pub fn from_atom(atom: &SubmodularAtom) -> Result<Self> {
        let members = atom.members().to_vec();
        let weight = atom.weight();
        let pick = |mask: &[bool]| -> Vec<usize> {
            members
                .iter()
                .zip(mask)
                .filter(|(_, &b)| b)
                .map(|(&v, _)| v)
                .collect()
        };
        Ok(match atom.kind() {
            AtomKind::GraphEdge => Self::Edge {
                members: [members[0], members[1]],
                weight,
            },
            AtomKind::Hyperedge => Self::Hyperedge { members, weight },
            AtomKind::DirectedHyperedge { head, tail } => Self::DirectedHyperedge {
                head: pick(head),
                tail: pick(tail),
                members,
                weight,
            },
            AtomKind::Oracle(SetOracle::Table(table)) => Self::Table {
                members,
                table: table.to_vec(),
                weight,
            },
            AtomKind::Oracle(SetOracle::Callback(_)) => {
                return Err(QdsfmError::InvalidInput(
                    "callback atoms cannot be written to a file".into(),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub a: Vec<f64>,
    /// Diagonal of `W`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    pub atoms: Vec<AtomSpec>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<ProblemInstance> {
        if self.a.len() != self.n {
            return Err(QdsfmError::DimensionMismatch {
                expected: self.n,
                got: self.a.len(),
            });
        }
        let w = match &self.w {
            Some(w) => WeightMatrix::new(w.clone())?,
            None => WeightMatrix::identity(self.n),
        };
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(index, spec)| {
                spec.to_atom().map_err(|e| QdsfmError::InvalidAtom {
                    index,
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProblemInstance::new(self.a.clone(), w, atoms)
    }

    pub fn from_instance(instance: &ProblemInstance) -> Result<Self> {
        Ok(Self {
            n: instance.n(),
            a: instance.a().to_vec(),
            w: Some(instance.w().diag().to_vec()),
            atoms: instance
                .atoms()
                .iter()
                .map(AtomSpec::from_atom)
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub x: Vec<f64>,
    pub gap: f64,
    pub iters: u64,
    pub converged: bool,
}

/// Graph for PageRank; `s` defaults to the indicator of vertex 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
}

impl GraphFile {
    pub fn graph(&self) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
        }
    }

    pub fn teleport(&self) -> Vec<f64> {
        self.s.clone().unwrap_or_else(|| {
            let mut s = vec![0.0; self.n];
            if let Some(first) = s.first_mut() {
                *first = 1.0;
            }
            s
        })
    }
}

/// `{"labels": {"17": 0, "42": 1}}`; the class count defaults to
/// `max(2, largest label + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelsFile {
    pub labels: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_classes: Option<usize>,
}

impl LabelsFile {
    pub fn to_dataset(&self, n: usize) -> Result<LabeledDataset> {
        let mut labels = BTreeMap::new();
        for (key, &class) in &self.labels {
            let v: usize = key
                .trim()
                .parse()
                .map_err(|_| QdsfmError::Parse(format!("label key '{key}' is not a vertex index")))?;
            labels.insert(v, class);
        }
        let k = self
            .num_classes
            .unwrap_or_else(|| labels.values().max().map_or(2, |m| (m + 1).max(2)));
        LabeledDataset::new(n, k, labels)
    }
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| QdsfmError::Parse(e.to_string()))
}
