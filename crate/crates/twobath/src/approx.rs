//! Closed-form approximations for the covariance elements and the critical
//! inverse temperature, valid when bath 1 is hot against the fast mode
//! (`β₁Ω₊ ≪ 1`), bath 2 is cold against the slow mode (`β₂Ω₋ ≫ 1`), and
//! both dampings are weak (`γ_a ≪ Ω±`).
//!
//! Every element is kept as an explicit list of labeled [`Term`]s so that
//! individual summands (the leading `1/β₁` pieces, the cutoff logarithms,
//! the cold-bath `1/β₂²`-type corrections) can be inspected and regression
//! tested one at a time; [`ApproxTerms::sum`] collapses them into a
//! [`CovarianceMatrix`].
//!
//! Conventions follow the expansion exactly as derived, including two
//! deliberate literalisms:
//!
//! * the `ln(Λ/(Ω₊Ω₋))` summand in `v44` keeps its dimensionally odd
//!   argument, evaluated in the `Ω₀ = 1` unit system this crate works in
//!   (the consistent form would read `Λ²/(Ω₊Ω₋)`);
//! * the step functions `Θ(β₁Λ - 1)` on the cutoff logarithms are sharp,
//!   with `Θ(0) = 0` — the boundary is measure-zero and far outside the
//!   validity window.
//!
//! At this expansion order `v33 = v11` even though the exact elements
//! differ for `γ₁ ≠ γ₂`; within the regime window the difference is inside
//! the stated accuracy. The coupling must be nonzero: several summands
//! carry `1/σ` (their `σ → 0` limits are finite but are not taken here).

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::{BathParams, SystemParams};
use crate::scalar::{lit, Real};

/// One labeled summand of a closed-form element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T> {
    pub label: &'static str,
    pub value: T,
}

impl<T> Term<T> {
    fn new(label: &'static str, value: T) -> Self {
        Self { label, value }
    }
}

/// Where the parameters sit relative to the approximation's validity window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxRegimeReport<T> {
    /// `β₁ Ω₊` — must be small (hot bath 1).
    pub beta1_omega_plus: T,
    /// `β₂ Ω₋` — must be large (cold bath 2).
    pub beta2_omega_minus: T,
    /// `beta1_omega_plus < regime_hi ∧ beta2_omega_minus > regime_lo`.
    pub in_regime: bool,
}

/// Default operationalization of `β₁Ω₊ ≪ 1`: the window edge `0.5`.
pub const REGIME_HI_DEFAULT: f64 = 0.5;
/// Default operationalization of `β₂Ω₋ ≫ 1`: the window edge `5`.
pub const REGIME_LO_DEFAULT: f64 = 5.0;

impl<T: Real> ApproxRegimeReport<T> {
    /// Evaluate with the default window `(0.5, 5)`.
    pub fn evaluate(
        system: &SystemParams<T>,
        bath1: &BathParams<T>,
        bath2: &BathParams<T>,
    ) -> Self {
        Self::evaluate_with(
            system,
            bath1,
            bath2,
            lit(REGIME_HI_DEFAULT),
            lit(REGIME_LO_DEFAULT),
        )
    }

    /// Evaluate with custom window edges.
    pub fn evaluate_with(
        system: &SystemParams<T>,
        bath1: &BathParams<T>,
        bath2: &BathParams<T>,
        regime_hi: T,
        regime_lo: T,
    ) -> Self {
        let modes = system.normal_modes();
        let b1op = bath1.beta() * modes.omega_plus;
        let b2om = bath2.beta() * modes.omega_minus;
        Self {
            beta1_omega_plus: b1op,
            beta2_omega_minus: b2om,
            in_regime: b1op < regime_hi && b2om > regime_lo,
        }
    }
}

/// The labeled summands of every covariance element. `v33` shares `v11`'s
/// list (they coincide at this expansion order).
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxTerms<T> {
    pub v11: Vec<Term<T>>,
    pub v22: Vec<Term<T>>,
    pub v44: Vec<Term<T>>,
    pub v13: Vec<Term<T>>,
    pub v14: Vec<Term<T>>,
    pub v24: Vec<Term<T>>,
}

impl<T: Real> ApproxTerms<T> {
    /// Sum every term list into an (unvalidated) covariance matrix with
    /// `v33 = v11`.
    pub fn sum(&self) -> CovarianceMatrix<T> {
        let total = |terms: &[Term<T>]| terms.iter().fold(T::zero(), |acc, t| acc + t.value);
        CovarianceMatrix::from_raw(
            total(&self.v11),
            total(&self.v22),
            total(&self.v11),
            total(&self.v44),
            total(&self.v13),
            total(&self.v14),
            total(&self.v24),
        )
    }
}

/// Closed-form covariance elements, term by term. Dampings enter as the
/// baths' effective (possibly temperature-dependent) rates.
pub fn approx_terms<T: Real>(
    system: &SystemParams<T>,
    bath1: &BathParams<T>,
    bath2: &BathParams<T>,
    cutoff: T,
) -> ApproxTerms<T> {
    let m = system.mass();
    let sigma = system.sigma();
    let omega2 = system.omega() * system.omega();
    let modes = system.normal_modes();
    let (op, om) = (modes.omega_plus, modes.omega_minus);
    let (g1, g2) = (bath1.effective_damping(), bath2.effective_damping());
    let gt = g1 + g2;
    let (b1, b2) = (bath1.beta(), bath2.beta());

    let pi = T::PI();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let op2om2 = op * op * om * om;
    let op4om4 = op2om2 * op2om2;
    let mode_log = (op / om).ln();
    // Θ(β₁Λ − 1): the bath-1 cutoff logarithm only exists once the thermal
    // wavelength resolves the cutoff.
    let cutoff_log_1 = if b1 * cutoff > T::one() {
        m * g1 / pi * (b1 * cutoff).ln()
    } else {
        T::zero()
    };
    let inv_b2_sq = T::one() / (b2 * b2);
    let inv_b2_4 = inv_b2_sq * inv_b2_sq;
    let pi3 = pi * pi * pi;

    let v11 = vec![
        Term::new(
            "bath1 thermal 1/beta1",
            omega2 / op2om2 * g1 / gt / (m * b1),
        ),
        Term::new(
            "bath2 zero-point",
            g2 / (four * m * gt) * (T::one() / op + T::one() / om),
        ),
        Term::new("bath2 mode-ratio log", g2 / (two * pi * m * sigma) * mode_log),
        Term::new("bath2 constant", -(g2 / (two * pi * m)) * (omega2 / op2om2)),
        Term::new(
            "bath2 thermal 1/beta2^2",
            two * pi * g2 * sigma * sigma / (lit::<T>(3.0) * m * op4om4) * inv_b2_sq,
        ),
    ];

    let v22 = vec![
        Term::new("bath1 cutoff log", cutoff_log_1),
        Term::new("bath1 thermal 1/beta1", m * g1 / gt / b1),
        Term::new("bath2 zero-point", m * g2 / (four * gt) * (op + om)),
        Term::new("bath2 constant", -(m * g2 / (two * pi))),
        Term::new(
            "bath2 mode-ratio log",
            m * g2 * omega2 / (two * pi * sigma) * mode_log,
        ),
        Term::new(
            "bath2 thermal 1/beta2^4",
            four * pi3 * m * g2 * sigma * sigma / (lit::<T>(15.0) * op4om4) * inv_b2_4,
        ),
    ];

    let v44 = vec![
        Term::new("bath1 cutoff log", cutoff_log_1),
        Term::new("bath1 thermal 1/beta1", m * g1 / gt / b1),
        // Dimensionally odd as derived; evaluated literally in Ω₀ = 1 units.
        Term::new(
            "bath2 cutoff log",
            two * m * g2 / pi * (cutoff / (op * om)).ln(),
        ),
        Term::new("bath2 zero-point", m * g2 / (four * gt) * (op + om)),
        Term::new(
            "bath2 mode-ratio log",
            m * g2 * omega2 / (two * pi * sigma) * mode_log,
        ),
        Term::new("bath2 constant", -(m * g2 / (two * pi))),
        Term::new(
            "bath2 thermal 1/beta2^4",
            four * pi3 * m * g2 * sigma * sigma / (lit::<T>(15.0) * op4om4) * inv_b2_4,
        ),
    ];

    let v13 = vec![
        Term::new(
            "bath1 thermal 1/beta1",
            -(sigma / op2om2) * g1 / gt / (m * b1),
        ),
        Term::new(
            "bath2 zero-point",
            g2 / (four * m * gt) * (T::one() / op - T::one() / om),
        ),
        Term::new("bath2 constant", g2 / (two * pi * m) * (sigma / op2om2)),
        Term::new(
            "bath2 thermal 1/beta2^2",
            -(two * pi * g2 * sigma * omega2 / (lit::<T>(3.0) * m * op4om4)) * inv_b2_sq,
        ),
    ];

    let v14 = vec![
        Term::new("bath1 thermal 1/beta1", -(two / sigma) * g1 * g2 / gt / b1),
        Term::new(
            "bath2 thermal 1/beta2^4",
            lit::<T>(8.0) * pi3 * g1 * g2 * sigma / (lit::<T>(15.0) * op4om4) * inv_b2_4,
        ),
    ];

    let v24 = vec![
        Term::new(
            "bath1 thermal beta1",
            m * sigma / lit::<T>(12.0) * g1 * b1 / gt,
        ),
        Term::new("bath2 zero-point", m * g2 / (four * gt) * (op - om)),
        Term::new("bath2 mode-ratio log", -(m * g2 / (two * pi)) * mode_log),
        Term::new(
            "bath2 thermal 1/beta2^4",
            -(four * pi3 * m * g2 * sigma * omega2 / (lit::<T>(15.0) * op4om4)) * inv_b2_4,
        ),
    ];

    ApproxTerms {
        v11,
        v22,
        v44,
        v13,
        v14,
        v24,
    }
}

/// Closed-form covariance matrix (the sums of [`approx_terms`]).
///
/// Never fails: validity is a regime question, answered by
/// [`ApproxRegimeReport`], not an input-domain one.
pub fn approx_covariance<T: Real>(
    system: &SystemParams<T>,
    bath1: &BathParams<T>,
    bath2: &BathParams<T>,
    cutoff: T,
) -> CovarianceMatrix<T> {
    approx_terms(system, bath1, bath2, cutoff).sum()
}

/// Truncation order for the analytic critical inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beta1cOrder {
    /// Keep only the leading order in `γ₁`:
    /// `4πγ₁ / (γ₂[π√(5Ω₊² − 2Ω₊Ω₋ + Ω₋²) − π(Ω₊ + Ω₋) − γ₂ ln|Λ⁴/Ω₋⁴|])`.
    Leading,
    /// Evaluate the bracketed square-root expression without expanding in
    /// `γ₁`.
    Full,
}

/// Analytic critical inverse temperature of bath 1 for fixed dampings.
///
/// Derived for `γ₁ < γ₂`, both weak, with the cold bath deep in its quantum
/// regime. Fails with a domain error when the denominator is not positive —
/// the signal that the cutoff is too large for the small-`γ` expansion (the
/// `ln Λ` contribution must stay sub-leading).
pub fn beta1c_closed_form<T: Real>(
    system: &SystemParams<T>,
    gamma1: T,
    gamma2: T,
    cutoff: T,
    order: Beta1cOrder,
) -> Result<T> {
    let modes = system.normal_modes();
    let (op, om) = (modes.omega_plus, modes.omega_minus);
    let pi = T::PI();
    let four = lit::<T>(4.0);
    // ln|Λ⁴/Ω₋⁴|, computed in ratio form to avoid overflow at large Λ.
    let big_l = four * (cutoff / om).abs().ln();
    let combo = lit::<T>(5.0) * op * op - lit::<T>(2.0) * op * om + om * om;
    let numerator = four * pi * gamma1;

    let denominator = match order {
        Beta1cOrder::Leading => {
            gamma2 * (pi * combo.sqrt() - pi * (op + om) - gamma2 * big_l)
        }
        Beta1cOrder::Full => {
            let gt = gamma1 + gamma2;
            let inner = pi
                * pi
                * (four * gamma1 * gamma1 * op * op
                    + lit::<T>(8.0) * gamma1 * gamma2 * op * op
                    + gamma2 * gamma2 * combo)
                + gamma2 * gamma2 * gt * big_l * (lit::<T>(2.0) * pi * (om - op) + gt * big_l);
            if inner < T::zero() {
                return Err(Error::Domain(format!(
                    "square root argument {inner} is negative in the analytic critical temperature"
                )));
            }
            inner.sqrt() - gamma2 * gt * big_l - pi * gamma2 * (op + om)
        }
    };
    if !(denominator > T::zero()) {
        return Err(Error::Domain(format!(
            "analytic critical-temperature denominator {denominator} is not positive; \
             the cutoff is too large for the small-damping expansion"
        )));
    }
    Ok(numerator / denominator)
}

/// Analytic critical inverse temperature with temperature-dependent damping
/// of the solved-for bath, `γ₁ = γ̄₁ β₁^{-α₁}`.
///
/// Solves the fixed point `β = F(γ̄₁ β^{-α₁}, γ₂)` of [`beta1c_closed_form`]
/// by iteration (the map contracts with exponent `α₁/(1+α₁) < 1`). `γ₂` is
/// the already-evaluated effective damping of the fixed bath.
pub fn beta1c_closed_form_tdep<T: Real>(
    system: &SystemParams<T>,
    gamma_bar1: T,
    alpha1: T,
    gamma2: T,
    cutoff: T,
    order: Beta1cOrder,
) -> Result<T> {
    let mut beta = beta1c_closed_form(system, gamma_bar1, gamma2, cutoff, order)?;
    if alpha1 == T::zero() {
        return Ok(beta);
    }
    let tol = lit::<T>(1e-12);
    for _ in 0..200 {
        let g1 = gamma_bar1 * beta.powf(-alpha1);
        let mapped = beta1c_closed_form(system, g1, gamma2, cutoff, order)?;
        // The map β ↦ f(γ̄₁β^{-α}) has log-slope ≈ −α (exactly −α at leading
        // order, where f is linear in γ₁), so plain iteration rings or
        // diverges for α ≥ 1. Solving the local affine recursion
        // u' = ln f − α(u' − u) in log space instead contracts for every α
        // and is exact in one step at leading order.
        let next = ((mapped.ln() + alpha1 * beta.ln()) / (T::one() + alpha1)).exp();
        let done = (next - beta).abs() <= tol * next.abs();
        beta = next;
        if done {
            return Ok(beta);
        }
    }
    Err(Error::Domain(
        "fixed-point iteration for the temperature-dependent analytic critical temperature \
         did not converge"
            .into(),
    ))
}
