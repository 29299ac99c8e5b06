//! Steady-state quadrature covariance and Gaussian entanglement of two
//! bilinearly coupled harmonic oscillators, each damped by its own Ohmic heat
//! bath at its own temperature.
//!
//! The physical setup is a pair of identical oscillators (bare frequency `Ω`,
//! mass `m`) with bilinear position coupling `σ`, obeying the coupled Langevin
//! equations
//!
//! ```text
//! χ̈₁ + 2γ₁χ̇₁ + Ω²χ₁ + σχ₂ = η₁(t)/m
//! χ̈₂ + 2γ₂χ̇₂ + Ω²χ₂ + σχ₁ = η₂(t)/m
//! ```
//!
//! where each `η_a` is stationary Gaussian noise with the quantum (Hadamard)
//! spectrum `2 m γ_a ω coth(ω β_a / 2)` of a bath at inverse temperature
//! `β_a`, with a hard high-frequency cutoff `Λ`. The damping may carry a
//! power-law temperature dependence, `γ_a = γ̄_a T_a^α_a`.
//!
//! At late times the two-oscillator state is Gaussian and fully described by
//! the 10 independent second moments of `(χ₁, p₁, χ₂, p₂)`. This crate
//! computes those moments as frequency-space integrals over the response
//! matrix ([`covariance::steady_covariance`]), evaluates the standard
//! two-mode Gaussian entanglement machinery on the result — Simon's
//! separability invariants, symplectic eigenvalues of the partial transpose,
//! negativities ([`entanglement`]) — and locates the critical inverse
//! temperature at which entanglement disappears ([`critical`]).
//!
//! Supporting layers:
//!
//! * [`model`] — parameter types, the frequency-space response matrix, the
//!   thermal noise kernel, normal-mode frequencies.
//! * [`quadrature`] — adaptive Gauss–Kronrod integration on `[0, Λ]` with
//!   mandatory panel breakpoints around narrow resonances.
//! * [`approx`] — closed-form high-`T₁`/low-`T₂` weak-damping approximations
//!   to every covariance element, and the closed-form critical `β₁`.
//! * [`oracle`] — independent cross-checks: an exact residue-sum evaluation
//!   of the classical (flat-kernel) limit, and a time-domain Langevin Monte
//!   Carlo estimator.
//!
//! # Units
//!
//! `ħ = k_B = 1`. Frequencies, dampings and `Λ` are quoted in units of a
//! reference frequency `Ω₀ = 1`; inverse temperatures in units of `1/Ω₀`;
//! the coupling `σ` in units of `Ω₀²`. Mass is arbitrary (default 1).
//!
//! # Numeric precision
//!
//! All numerics are generic over the scalar type through the [`Real`] trait
//! (any `num_traits::Float` with the usual conversions — `f32`, `f64`, …).
//! Concrete `f64` aliases such as [`SystemParams64`] are exported at the
//! crate root; `f64` is what the default tolerances are calibrated for.

pub mod approx;
pub mod covariance;
pub mod critical;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quadrature;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` aliases for the main parameter and result types.
pub type SystemParams64 = model::SystemParams<f64>;
/// See [`model::BathParams`].
pub type BathParams64 = model::BathParams<f64>;
/// See [`quadrature::QuadratureConfig`].
pub type QuadratureConfig64 = quadrature::QuadratureConfig<f64>;
/// See [`covariance::SteadyStateProblem`].
pub type SteadyStateProblem64 = covariance::SteadyStateProblem<f64>;
/// See [`covariance::CovarianceMatrix`].
pub type CovarianceMatrix64 = covariance::CovarianceMatrix<f64>;
/// See [`entanglement::EntanglementReport`].
pub type EntanglementReport64 = entanglement::EntanglementReport<f64>;
/// See [`critical::CriticalQuery`].
pub type CriticalQuery64 = critical::CriticalQuery<f64>;
/// See [`critical::CriticalLine`].
pub type CriticalLine64 = critical::CriticalLine<f64>;
/// See [`oracle::mc::McConfig`].
pub type McConfig64 = oracle::mc::McConfig<f64>;
