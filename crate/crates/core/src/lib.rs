//! Triangular polynomial dynamical systems over prime fields.
//!
//! A system `F = (F_0, ..., F_m)` acts on `F_p^{m+1}` with each `F_i` linear in
//! `X_i` and its coefficients depending only on `X_{i+1}, ..., X_m`. This crate
//! provides exact field and polynomial arithmetic, validation of the system
//! class against a unit upper triangular shape matrix, symbolic iteration with
//! the matching degree law, orbit generation with cycle detection, exponential
//! sums and discrepancy, a walk-based hash, and vector linear complexity.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod field;
pub mod hash;
pub mod lincomp;
pub mod orbit;
pub mod poly;
pub mod space;
pub mod stats;
pub mod system;

pub use error::Error;
pub use field::{FieldElement, Prime, UnitComplex};
pub use poly::{Degree, Monomial, MultiPoly};
pub use system::{Schedule, ShapeMatrix, SystemFamily, TriangularSystem};

pub type Result<T, E = Error> = core::result::Result<T, E>;
