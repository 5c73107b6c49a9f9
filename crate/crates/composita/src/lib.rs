//! Counting machinery for composita of S3 cubic fields with odd abelian
//! fields, ordered by discriminant: field enumeration, local densities,
//! Dirichlet-series bookkeeping, an exact inclusion-exclusion sieve, the
//! rational exponent calculus behind the power-saving error terms, and the
//! Euler-product constants of the final asymptotic.

pub mod abelian;
pub mod cache;
pub mod cubic;
pub mod densities;
pub mod dirichlet;
pub mod error;
pub mod euler;
pub mod exponent;
pub mod ingest;
pub mod permgroup;
pub mod sieve;
pub mod special;

pub use error::{Error, Result};
