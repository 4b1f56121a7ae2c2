//! Reconstruction of the time-dependent coefficients of Gaussian-shape-preserving
//! (GSP) convolutionless master equations.
//!
//! The crate is split along the measurement chain:
//!
//! * [`dynamics`] evolves the first and second cumulants of a Gaussian probe,
//!   either with closed-form propagators or with an adaptive Runge-Kutta solver.
//! * [`tomography`] synthesizes symplectic tomograms of a Gaussian state and
//!   inverts a handful of tomogram points back to the five cumulants.
//! * [`integral`] and [`differential`] turn measured cumulants into
//!   master-equation coefficients (or integrals of them).
//! * [`sampling`] decides where in time to measure and rebuilds continuous
//!   curves from the discrete estimates.
//! * [`qbm`] is the Ohmic quantum-Brownian-motion benchmark with its closed
//!   forms and Fourier transforms.
//!
//! Natural units are used throughout: `ħ = k_B = 1`, and by default `m = ω = 1`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// NaN must fail validation, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod differential;
pub mod dynamics;
mod error;
pub mod integral;
pub mod linalg;
pub mod ode;
pub mod qbm;
pub mod quadrature;
pub mod sampling;
pub mod tomography;

pub use error::{Error, Result};

/// Crate version, recorded in run provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use dynamics::{
    CumulantVectors, Diagnostic, DiffusionVector, DriftMatrices, GaussianState,
    HamiltonianParams, MecSet, Trajectory,
};
pub use qbm::{OhmicModel, OhmicParams};
pub use sampling::{SampledFunction, SpectrumEstimate};
