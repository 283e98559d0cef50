//! Bivariate quantum Chebyshev probabilistic models.
//!
//! A model encodes `(u, v)` in two Chebyshev feature registers, optionally
//! entangles them with an H + CZ correlation layer, applies a real-amplitude
//! ansatz to each register, and reads the all-zeros amplitude `A(u, v)`.
//! The trained quantity is `alpha A^2 + beta`; `A` itself is a bivariate
//! Chebyshev expansion of degree `2^N - 1` in each variable, which is what
//! makes fine-grid sampling through the inverse Chebyshev transform possible.

pub mod cheb;
pub mod compare;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod model;
pub mod sampler;
pub mod sim;

pub use error::{Error, Result};
