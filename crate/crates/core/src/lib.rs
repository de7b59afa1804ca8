//! Vertex rankings for recovering an active connected module from noisy
//! vertex weights on a graph.
//!
//! The main entry points are [`optimal::optimal_ranking`] (exact expected-AUC
//! maximisation over all connected sets, small graphs only),
//! [`semiheuristic::semiheuristic_ranking`] (recursive refinement via a
//! maximum-weight connected subgraph solver) and the baselines in
//! [`baseline`].

pub mod baseline;
pub mod benchgen;
pub mod bum;
pub mod enumerate;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod mwcs;
pub mod optimal;
pub mod posterior;
pub mod semiheuristic;

#[cfg(test)]
mod testutil;

pub use bum::{fit_bum, BumParams, ScoreVector, VertexWeights};
pub use error::{Error, Result};
pub use eval::{auc, is_connectivity_monotonous, Ranking};
pub use graph::{is_connected, load_graph, Graph, Vertex, VertexSet};
pub use posterior::ModulePrior;
