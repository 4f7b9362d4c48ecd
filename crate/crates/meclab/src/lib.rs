//! Counting Markov equivalence classes and designing single-node
//! interventions on chordal chain graphs.
//!
//! The crate is organized around an incremental iterator over the possible
//! interventional essential graphs of a target node ([`lazyiter`]), which
//! powers exact class-size computation ([`count`]) and worst-case experiment
//! design in active and budgeted passive settings ([`design`]). Brute-force
//! reference implementations for small graphs live in [`oracle`], and
//! [`gen`] produces seeded random connected chordal graphs for tests and
//! benchmarks.

pub mod count;
pub mod design;
pub mod error;
pub mod gen;
pub mod graph;
pub mod lazyiter;
pub mod oracle;
pub mod orient;
pub mod set;

pub use design::{CostModel, Objective, ObjectiveValue};
pub use error::{Error, Result};
pub use gen::GenSpec;
pub use graph::PdGraph;
pub use lazyiter::InterventionResult;
pub use set::{NodeSet, MAX_NODES};
