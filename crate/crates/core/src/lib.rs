//! Chebyshev extrapolation of Fourier data from a small ball to a larger
//! one, reconstruction by inverse transform, and numerical verification of
//! the associated stability estimates.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chebyshev;
pub mod error;
pub mod experiments;
pub mod extrapolation;
pub mod fourier;
pub mod quad;

pub use error::{Error, Result};
