//! Multiparty quantum information quantities and the inner and outer bounds on
//! the multiparty distributed-compression rate region.
//!
//! All entropic quantities are in bits (logarithms base 2).

pub mod classical;
pub mod decouple;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod qstate;
pub mod rateregion;
pub mod rescalc;
pub mod selftest;
pub mod squashed;

pub use error::{Error, Result};
