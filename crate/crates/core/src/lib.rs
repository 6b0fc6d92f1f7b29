//! Maximum weight independent set via data reduction, struction-based graph
//! transformations and branch-and-reduce.
//!
//! The algorithms are generic over an unsigned integer weight type; the
//! aliases below fix it to `u64`.
//!
//! ```
//! use struction::{solve, Graph, Preset, SolverConfig};
//!
//! let g = Graph::from_edges(&[2, 3, 2], &[(0, 1), (1, 2)]);
//! let r = solve(&g, &SolverConfig::with_preset(Preset::CyclicFast)).unwrap();
//! assert_eq!(r.weight, 4);
//! ```

pub mod blowup;
pub mod graph;
pub mod io;
pub mod log;
pub mod reduce;
pub mod solver;
pub mod struction;
pub mod weight;

pub use blowup::{cyclic_blow_up, estimate_l, preprocess, BlowupConfig, CyclicStats, Preset};
pub use graph::{DynGraph, GraphError, VertexId};
pub use log::{verify_lift, LiftError, Provenance, TransformEvent};
pub use reduce::{reduce, ReduceConfig, Rule};
pub use solver::{brute_force_mwis, solve, SolveError, SolveStatus, SolverConfig};
pub use struction::{apply_struction, StructionVariant};
pub use weight::Weight;

pub type Graph = DynGraph<u64>;
pub type TransformLog = log::TransformLog<u64>;
pub type KernelResult = reduce::KernelResult<u64>;
pub type BlowupResult = blowup::BlowupResult<u64>;
pub type SolveResult = solver::SolveResult<u64>;
