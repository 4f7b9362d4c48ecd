//! Crate-wide error type.

use crate::set::MAX_NODES;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Graph or cost file did not conform to the text format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An operation requiring chordality was given a non-chordal graph.
    /// Carries a chordless cycle of length >= 4 as witness.
    #[error("graph is not chordal; chordless cycle {0:?}")]
    NotChordal(Vec<usize>),

    /// The directed part of the input contains a cycle.
    #[error("directed cycle in input")]
    DirectedCycle,

    /// Node count exceeds the fixed bit-set width.
    #[error("node count {0} exceeds the supported maximum of {MAX_NODES}")]
    TooManyNodes(usize),

    /// Brute-force reference routines refuse graphs above their cap.
    #[error("oracle cap exceeded: n={n} > cap={cap}")]
    OracleCap { n: usize, cap: usize },
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
