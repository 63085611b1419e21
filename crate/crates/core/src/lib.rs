//! Quantum averages and dispersions as moments of quadratic functionals of
//! complex Gaussian random fields.
//!
//! A pure state `ψ` is represented by a zero-mean circularly-symmetric complex
//! Gaussian field with covariance `D_ψ = ψψ† + I`. The observable `A` becomes
//! the functional `f_A(φ) = φ†Aφ`; its moments are given in closed form by
//! [`correspondence`] and estimated by sampling in [`montecarlo`].

pub mod cli;
pub mod correspondence;
pub mod error;
pub mod gaussian_field;
pub mod hilbert;
pub mod montecarlo;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
