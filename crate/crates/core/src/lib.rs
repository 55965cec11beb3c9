//! Heat kernel, semigroup and resolvent of vector-valued Ornstein-Uhlenbeck
//! operators `A Δv + <Sx, ∇v> - Bv` with complex matrix coefficients, plus the
//! numerical checks of their estimates. See the crate examples for entry points.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod dissipativity;
pub mod error;
pub mod fields;
pub mod harness;
pub mod kernel;
pub mod quadrature;
pub mod resolvent;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
