//! Exact BV and Moyal-Weyl quantization of free field theories on
//! discrete 1+1 dimensional lattice cylinders.
//!
//! All arithmetic happens in `Q(i)[h]` with `h` a formal parameter, so every
//! identity is checked with zero tolerance.

pub mod bvtheory;
pub mod complexes;
pub mod error;
pub mod lattice;
pub mod quantize;
pub mod sampling;
pub mod scalar;
pub mod symalg;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{GaussianRational, HScalar, Rational};
