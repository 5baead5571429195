//! Hypergeometric functions over finite fields, computed exactly.
//!
//! Values live in cyclotomic fields ([`cyclotomic`]). Gauss and Jacobi sums
//! ([`charsum`]) over a field from [`field`] feed the one-variable and
//! Lauricella functions ([`hypergeometric`]), the identity checks
//! ([`identities`]), the χ-decomposed point counts ([`varieties`]) and the
//! L-functions built from them ([`lseries`]).

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod character;
pub mod charsum;
pub mod hypergeometric;
pub mod f4;
pub mod identities;
pub mod varieties;
pub mod lseries;
