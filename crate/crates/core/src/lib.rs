//! Numerical core for quantum illumination with a correlation-to-displacement
//! (C→D) receiver.
//!
//! The receiver heterodynes every return mode, uses the outcomes to combine the
//! conditional idlers into a single displaced-thermal mode, and then has to tell
//! that mode apart from a thermal one. This crate holds everything needed to
//! evaluate that pipeline without touching the filesystem:
//!
//! - [`specfn`]: Lambert W₋₁, gamma densities, Laguerre polynomials.
//! - [`fock`]: truncated Fock-space states, dephasing and the Helstrom limit.
//! - [`protocol`]: scenario parameters and conditional-state statistics.
//! - [`analytic`]: error probabilities, bounds, thresholds and exponents.
//! - [`source`]: SPDC frequency-mode source bookkeeping.
//! - [`qpg`]: cavity-enhanced quantum pulse gate transfer function.
//! - [`mc`]: seeded Monte Carlo simulation of the measurement chain.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
pub mod fock;
mod linalg;
pub mod mc;
pub mod protocol;
pub mod qpg;
pub mod quadrature;
pub mod source;
pub mod specfn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
