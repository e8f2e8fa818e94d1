//! Archimedean special functions for GL(3) Maass forms of generalized
//! principal series type with minimal K-type.
//!
//! The crate provides the vector-valued Whittaker function, the Stade-type
//! Rankin-Selberg formula, the Bessel kernels of the Kuznetsov trace formula,
//! GL(3) Kloosterman sums, the integral transforms built from the kernels and
//! the quantities entering the Weyl law.  Every closed form comes with an
//! independent numerical oracle.

pub mod error;
pub mod identities;
pub mod kernels;
pub mod kloosterman;
pub mod kuznetsov;
pub mod numerics;
pub mod stade;
pub mod weyl_group;
pub mod whittaker;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for the complex scalar type used throughout.
pub type C64 = Complex64;
