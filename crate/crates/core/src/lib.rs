//! Exact exterior calculus on extended multiphase space.
//!
//! Polynomial coefficients over the rationals make every identity of the
//! covariant Hamiltonian formalism an exact equality check.

#![allow(clippy::needless_range_loop)]

pub mod calculus;
pub mod chart;
pub mod connections;
pub mod error;
pub mod exterior;
pub mod hamiltonian;
pub mod linalg;
pub mod multiphase;
pub mod random;
pub mod vertical;
pub mod scalar;

pub use chart::{Chart, ChartKind, Coordinate};
pub use error::{Error, Result};
pub use exterior::{Blade, Form, Multivector};
pub use scalar::{Rational, Scalar};
