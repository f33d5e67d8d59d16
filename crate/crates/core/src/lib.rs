//! Exact construction and verification of multi-indexed (q-)Racah polynomials,
//! their duals, and the band-diagonal Hamiltonians built from them.

pub mod base;
pub mod bigreal;
pub mod closure;
pub mod dual;
pub mod error;
pub mod exact;
pub mod matrix;
pub mod params;
pub mod multi;
pub mod poly;
pub mod qlimit;
pub mod recurrence;
pub mod report;
pub mod shape;
pub mod suite;

pub use error::{Error, Result};
pub use exact::Scalar;
