//! Error types shared across the engine.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by tensor, network, logic, probability and training code.
#[derive(Debug, Error)]
pub enum Error {
    /// Two uses of the same variable name disagree on dimension, or a shape
    /// does not match the declared legs.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A state index or assignment is out of range or incomplete.
    #[error("index error: {0}")]
    Index(String),

    /// A connective was applied with an unsupported number of arguments.
    #[error("arity error: {0}")]
    Arity(String),

    /// A graph-structural precondition failed (cycle, non-tree, missing node).
    #[error("structure error: {0}")]
    Structure(String),

    /// An operation was invoked in the wrong state (e.g. missing messages).
    #[error("state error: {0}")]
    State(String),

    /// Input documents or expressions could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// User-supplied data is invalid (conflicting evidence, bad columns, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A Markov network with vanishing partition function.
    #[error("degenerate network: {0}")]
    Degenerate(String),

    /// A boolean contraction failed its integrality guarantee.
    #[error("internal consistency error: {0}")]
    Inconsistency(String),

    /// An all-zero activation vector cannot be canonicalized.
    #[error("degenerate activation: {0}")]
    DegenerateActivation(String),

    /// A moment-matching update hit a zero count on one side.
    #[error("non-representable moment: {0}")]
    NonRepresentableMoment(String),
}
