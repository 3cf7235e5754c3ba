//! Symplectic-dilation mixed wavelet transform on C x R.
//!
//! Signals are complex functions `g(alpha, x)` of a complex variable and a
//! real one. The transform analyses `alpha` with a symplectic map
//! `alpha -> s alpha - r alpha*` (`|s|^2 - |r|^2 = 1`) plus a complex shift,
//! and `x` with an ordinary dilation and shift. The crate also contains a
//! truncated two-mode Fock-space model of the same transform and the
//! associated lens–Fresnel kernel, used as independent cross-checks.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod engine;
pub mod error;
pub mod fock;
pub mod fourier;
pub mod io;
pub mod kernel;
pub mod model;
pub mod quadrature;
pub mod signals;
pub mod verify;
pub mod wavelet;

pub use error::{Result, SdwtError};
pub use model::*;
