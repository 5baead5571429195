//! Error type shared by the library.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in Q(zeta_{0})")]
    ZeroInverse(u64),
    #[error("cannot embed an element of order {from} into order {to}")]
    BadEmbedding { from: u64, to: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {size} exceeds the configured bound {bound}")]
    FieldTooLarge { size: u128, bound: u64 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("discrete logarithm of zero")]
    ZeroLog,
    #[error("{d} does not divide {modulus}")]
    NotDivisor { d: u64, modulus: u64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("root finding did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
