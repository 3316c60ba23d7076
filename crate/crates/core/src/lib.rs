//! Numerical pipeline for a Λ-type EIT atomic medium: linear dispersion and
//! its Taylor coefficients, steady-state Bloch response and Kerr-coefficient
//! extraction, envelope-equation coefficient calibration, bright-soliton
//! construction and split-step propagation, and the two-photon bound-state
//! problem (analytic form plus an independent lattice eigensolver).
//!
//! Units throughout: angular frequencies in rad/s, lengths in cm, times in s.
//! All core types are immutable after validation and all operations are pure,
//! so values may be shared freely across threads.

pub mod cli;
pub mod dispersion;
pub mod error;
pub mod params;
pub mod propagator;
pub mod reduction;
pub mod soliton;
pub mod twophoton;

pub use error::{Error, ErrorKind, Result};
pub use params::MediumParams;
pub use reduction::NlseCoefficients;
