//! Relation values, discrete functions, and the three relational operations
//! with their entropy measure. This layer has no memory semantics; registers
//! and systems build on it.

mod function;
mod ops;
mod relation;

pub use function::DiscreteFunction;
pub use ops::{
    abstraction, containment, entropy, function_to_relation, reduction, triangular_weights,
    SamplerPolicy,
};
pub use relation::{Relation, MAX_VALS};
