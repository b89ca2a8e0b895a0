use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Hyperedge, Hypergraph, LabeledDataset};
use crate::error::{QdsfmError, Result};

/// Two equal clusters `0..n/2` and `n/2..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub n: usize,
    pub within_per_cluster: usize,
    pub across: usize,
    pub edge_size: usize,
    pub labeled_per_cluster: usize,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            n: 1000,
            within_per_cluster: 500,
            across: 1000,
            edge_size: 20,
            labeled_per_cluster: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticProblem {
    pub hypergraph: Hypergraph,
    pub labels: LabeledDataset,
    /// Cluster of every vertex.
    pub truth: Vec<usize>,
}

pub fn generate_synthetic_hypergraph(params: &SyntheticParams) -> Result<SyntheticProblem> {
    let SyntheticParams {
        n,
        within_per_cluster,
        across,
        edge_size,
        labeled_per_cluster,
        seed,
    } = *params;
    if n < 2 || n % 2 != 0 {
        return Err(QdsfmError::InvalidInput(format!(
            "need an even number of vertices, got {n}"
        )));
    }
    let half = n / 2;
    if edge_size == 0 || edge_size > half {
        return Err(QdsfmError::InvalidInput(format!(
            "hyperedge size {edge_size} must lie in 1..={half}"
        )));
    }
    if labeled_per_cluster > half {
        return Err(QdsfmError::InvalidInput(format!(
            "cannot label {labeled_per_cluster} vertices of a cluster of size {half}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hyperedges = Vec::with_capacity(2 * within_per_cluster + across);
    for cluster in 0..2 {
        let offset = cluster * half;
        for _ in 0..within_per_cluster {
            let members = sample(&mut rng, half, edge_size)
                .into_iter()
                .map(|v| v + offset)
                .collect();
            hyperedges.push(Hyperedge::undirected(members));
        }
    }
    for _ in 0..across {
        hyperedges.push(Hyperedge::undirected(sample(&mut rng, n, edge_size).into_vec()));
    }

    let mut labels = BTreeMap::new();
    for cluster in 0..2 {
        for v in sample(&mut rng, half, labeled_per_cluster) {
            labels.insert(v + cluster * half, cluster);
        }
    }
    Ok(SyntheticProblem {
        hypergraph: Hypergraph::new(n, hyperedges)?,
        labels: LabeledDataset::new(n, 2, labels)?,
        truth: (0..n).map(|v| usize::from(v >= half)).collect(),
    })
}
