//! Exact symbolic kernel for rational additive-group actions.
//!
//! Derivations of rational function fields, their exponential flows and the
//! certification of rational integrability, local nilpotency, rational
//! slices, and the lattice criteria for homogeneous derivations on toric
//! varieties.

pub mod arith;
pub mod parser;
pub mod derivation;
pub mod flow;
pub mod toric;
