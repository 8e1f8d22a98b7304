//! Exact-arithmetic analysis of linear differential operators over Q(z).
//!
//! The crate decides the Calabi-Yau-type properties (P), (M), (N), (Q), (S)
//! of an operator, computes its local data at the point of maximally
//! unipotent monodromy (Frobenius flag, structure series, special
//! coordinate, Y-invariants, Lambert coefficients) and applies differential
//! Galois group criteria. All arithmetic is over arbitrary-precision
//! rationals; every derived object is re-verified by exact identities.

pub mod arith;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod series;
pub mod logseries;
pub mod operator;
pub mod annihilator;
pub mod frobenius;
pub mod normal_form;
pub mod cy;
pub mod galois;
pub mod parse;
pub mod corpus;
pub mod report;

pub use error::CyError;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision integer used throughout.
pub type Int = BigInt;
/// Arbitrary-precision rational; always stored reduced with positive denominator.
pub type Rat = BigRational;

/// Shorthand for small integer rationals.
pub fn rat(n: i64) -> Rat {
    Rat::from(Int::from(n))
}

/// Shorthand for p/q with small operands.
pub fn rat_frac(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}
