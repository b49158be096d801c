//! Biclique search in bipartite graphs, with the tooling to study where the
//! problem turns hard: gram-matrix bounds, instance features and labels, a
//! decision-tree classifier, and seeded phase-transition sweeps.

pub mod bigraph;
pub mod bits;
mod decimal;
pub mod dtree;
pub mod error;
pub mod exec;
pub mod features;
pub mod phaselab;
mod rng;
pub mod solver;

pub use bigraph::{Biclique, BipartiteGraph, GramMatrix, ObservationLog, Side};
pub use error::{Error, Result};
pub use features::{FeatureVector, Label, OrderParameter};
pub use solver::{Outcome, Pruning, SearchBudget, SolveOptions, SolveReport, Solver};
