//! A tensor-network reasoning engine.
//!
//! Propositional logic, probabilistic graphical models and hybrid
//! logic/probability models are all represented as contractions of tensor
//! networks over named categorical variables:
//!
//! - [`tensor`] / [`network`] — variable-decorated tensors, contraction and
//!   normalization;
//! - [`encoding`] — basis encodings of finite functions, decomposition graphs
//!   and their compilation, exactly-one constraint formats;
//! - [`logic`] — formulas as boolean tensors, model counting and entailment;
//! - [`probability`] — distributions, (conditional) independence, Markov
//!   networks and exponential families;
//! - [`propagation`] — tree belief propagation, directed belief propagation
//!   and constraint propagation over a shared message store;
//! - [`hln`] — hybrid logic networks and alternating moment matching.
//!
//! All values are 64-bit floats; all operations are pure functions of
//! immutable inputs and safe to call concurrently.

pub mod encoding;
pub mod error;
pub mod hln;
pub mod logic;
pub mod network;
pub mod probability;
pub mod propagation;
pub mod tensor;

pub use encoding::{Connective, DecompositionGraph, FunctionTable};
pub use error::{Error, Result};
pub use logic::{Expression, KnowledgeBase};
pub use network::{Message, TensorNetwork};
pub use tensor::{ElementaryTerm, Storage, Tensor, Variable, EQ_TOL, ZERO_TOL};
