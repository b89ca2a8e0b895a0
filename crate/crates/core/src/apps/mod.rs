//! Reductions of applications to QDSFM instances, plus rounding and data
//! preparation helpers.

mod hypergraph;
mod pagerank;
mod ssl;
mod sweep;
mod synthetic;
mod tabular;

pub use hypergraph::{Hyperedge, Hypergraph};
pub use pagerank::{build_pagerank_instance, pagerank_residual, Graph, PagerankTransform};
pub use ssl::{
    argmax_labels, build_ssl_instance, classification_error, LabeledDataset, Normalization,
    SslTransform,
};
pub use sweep::{cheeger_sweep, cheeger_sweep_with, sweep_value, Balance, SweepCut};
pub use synthetic::{generate_synthetic_hypergraph, SyntheticParams, SyntheticProblem};
pub use tabular::{ingest_tabular_dataset, BinningRule, ColumnKind, ColumnSpec, Schema};
