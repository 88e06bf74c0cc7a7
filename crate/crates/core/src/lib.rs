//! Deformation operators of associative submanifolds in flat G2 geometry.
//!
//! - [`g2`]: exact and floating-point algebra of φ, `×`, `χ`, `*`, `Λ³` splitting
//! - [`geometry`]: adapted frames, second fundamental form, Simons operators
//! - [`dirac`]: twisted Dirac operators on T³ and on the strip, `D^∨`, residuals
//! - [`boundary`]: boundary operator `D_L`, complex line bundles, Chern numbers, index

pub mod boundary;
pub mod dirac;
pub mod error;
pub mod exterior;
pub mod g2;
pub mod geometry;
pub mod scalar;

pub use error::{Error, Result};
