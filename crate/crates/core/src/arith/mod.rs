//! Exact arithmetic: rationals, sparse multivariate polynomials over Q and
//! the rational function field `Q(x_1, ..., x_n)`.

mod context;
mod gcd;
mod poly;
mod ratfunc;

use thiserror::Error;

pub use context::{VarContext, RESERVED};
pub use gcd::gcd;
pub use poly::{MPoly, Monomial};
pub use ratfunc::{RatFunc, FULL_GCD_TERMS};

/// Arbitrary-precision rational, always stored in lowest terms.
pub type BigRat = num::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("operands live in different variable contexts")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent too large")]
    ExponentTooLarge,
    #[error("invalid variable context: {0}")]
    InvalidContext(String),
}

/// Small integer as an exact rational.
pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}
