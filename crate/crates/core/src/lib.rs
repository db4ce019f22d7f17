//! Conditional-independence inference over element universes.

pub mod cli;
pub mod closure;
pub mod derivation;
pub mod dsep;
pub mod element;
pub mod error;
pub mod model;
pub mod mug;
pub mod prob;
pub mod script;
pub mod ugraph;

pub use element::{CanonicalStatement, Element, ElementSet, Statement, Universe};
pub use error::{Error, Result};

/// Exact joint distribution.
pub type RationalJoint = prob::DiscreteJoint<num_rational::BigRational>;
/// Floating-point joint distribution.
pub type FloatJoint = prob::DiscreteJoint<f64>;
