//! Exact scalars and dense polynomials.

pub mod field;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

use thiserror::Error;

pub use field::{int, rat, Field, Rational};
pub use poly::Poly;
pub use ratfunc::{QPoly, RatFunc};
pub use scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division leaves a nonzero remainder")]
    NotDivisible,
}

/// Polynomial in `x` over `Scalar`.
pub type XPoly = Poly<Scalar>;
