//! Quadratic decomposable submodular function minimization.
//!
//! Solves
//!
//! ```text
//! min_x ||x - a||_W^2 + sum_r f_r(x)^2
//! ```
//!
//! where `W` is a positive diagonal matrix and each `f_r` is the Lovász
//! extension of a submodular set function supported on a subset `S_r` of the
//! ground set. The solvers work on the dual, a product of cones built from the
//! base polytopes of the atoms, and recover `x` from the dual iterate.

pub mod apps;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod instance;
pub mod projection;
pub mod solver;
pub mod submodular;
pub mod weights;

pub use error::{QdsfmError, Result};
pub use instance::ProblemInstance;
pub use projection::{project, ConePoint, Projection, ProjectionMethod, ProjectionParams};
pub use solver::{ap_solve, rcd_solve, DualState, MethodChoice, SolveResult, SolverConfig};
pub use submodular::{AtomKind, SubmodularAtom};
pub use weights::WeightMatrix;
