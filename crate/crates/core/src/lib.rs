//! Exact computations with tangent derivations of automorphisms of free
//! algebras: Fox calculus, Jacobians over the universal enveloping algebra,
//! divergence in the trace quotient, and certificates of absolute wildness.
//!
//! Four varieties are supported: polynomial algebras, free associative
//! algebras, free Lie algebras and free metabelian Lie algebras, all over
//! the rationals.

pub mod corpus;
pub mod deriv;
pub mod envelope;
pub mod error;
pub mod fox;
pub mod freealg;
pub mod linalg;
pub mod morphism;
pub mod script;
pub mod wildness;
pub mod word;

pub use deriv::{Derivation, DivergenceValue};
pub use envelope::{EnvElement, TraceClass};
pub use error::{Error, Result};
pub use fox::{fox_derivative, JacobianMatrix};
pub use freealg::{Element, Variety, VarietyKind};
pub use linalg::Matrix;
pub use morphism::{Automorphism, Endomorphism, FiltrationLevel};
pub use word::Monomial;

/// Exact rational coefficients.
pub type Rational = num::BigRational;
