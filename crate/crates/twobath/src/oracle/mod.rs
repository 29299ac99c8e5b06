//! Independent verification paths for the steady-state covariance.
//!
//! Two oracles cross-check the quadrature pipeline by entirely different
//! means:
//!
//! * [`classical`] — in the high-temperature (white-noise) limit every
//!   spectral integral is a rational function of frequency, evaluated here
//!   exactly by summing pole residues. No cutoff, no quadrature.
//! * [`mc`] — a stochastic time-domain simulation of the coupled Langevin
//!   equations with band-limited synthesized noise, estimating the same
//!   seven moments by trajectory-and-time averaging.

pub mod classical;
pub mod mc;

pub use classical::{classical_covariance, ClassicalLimitResult};
pub use mc::{mc_covariance, McConfig, McResult};
