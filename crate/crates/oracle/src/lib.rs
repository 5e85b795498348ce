//! Reference computations for checking `jtac`.
//!
//! Everything here is deliberately naive: adaptive quadrature, brute-force
//! summation, direct enumeration. None of it shares code with the crate it
//! checks, so agreement between the two is meaningful.

pub mod enumerate;
pub mod quad;
pub mod series;

pub use quad::{gauss_hermite, integrate, integrate_to_infinity};
