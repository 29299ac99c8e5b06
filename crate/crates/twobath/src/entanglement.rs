//! Gaussian entanglement diagnostics for the two-mode covariance matrix.
//!
//! For a covariance matrix `V = [[A, C], [Cᵀ, B]]` (blocks from
//! [`CovarianceMatrix::blocks`]), separability of the Gaussian state is
//! decided by the symplectic spectrum of the partial transpose: with
//! `Δ̄ = det A + det B - 2 det C`, the partially transposed symplectic
//! eigenvalues are
//!
//! ```text
//! η̄±² = ( Δ̄ ± √(Δ̄² - 4 det V) ) / 2
//! ```
//!
//! and the state is entangled if and only if `η̄₋ < 1/2`. The same formula
//! without the sign flip on `det C` gives the physical spectrum `η±`, whose
//! lower branch must satisfy the uncertainty bound `η₋ ≥ 1/2`.
//!
//! An equivalent algebraic form of the separability test is the pair of
//! fourth-order invariants
//!
//! ```text
//! ζ± = det A det B - Tr(A J C J B J Cᵀ J) - ¼(det A + det B) + (det C ± ¼)²
//! ```
//!
//! with `J` the single-mode symplectic form: `ζ₊ < 0` certifies
//! entanglement, and `ζ₊ = (η̄₋² - ¼)(η̄₊² - ¼)` connects the two pictures.
//! Entanglement is quantified by the logarithmic negativity
//! `E = max(0, -ln 2η̄₋)`.

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::linalg::{det4, Mat2};
use crate::scalar::{half, lit, Real};

/// The two fourth-order separability invariants `(ζ₊, ζ₋)`.
///
/// They differ by exactly `det C`: `ζ₊ = ζ₋ + det C`. For states with
/// `det C ≥ 0` both signs agree and the state is separable; `ζ₊ < 0` is the
/// entanglement certificate.
pub fn simon_invariants<T: Real>(cov: &CovarianceMatrix<T>) -> (T, T) {
    let (a, b, c) = cov.blocks();
    let j = Mat2::symplectic_j();
    // Tr(A J C J B J Cᵀ J)
    let chain = a
        .mul(&j)
        .mul(&c)
        .mul(&j)
        .mul(&b)
        .mul(&j)
        .mul(&c.transpose())
        .mul(&j);
    let quarter = lit::<T>(0.25);
    let det_a = a.det();
    let det_b = b.det();
    let det_c = c.det();
    let common = det_a * det_b - chain.trace() - quarter * (det_a + det_b);
    let zeta_plus = common + (det_c + quarter) * (det_c + quarter);
    let zeta_minus = common + (det_c - quarter) * (det_c - quarter);
    (zeta_plus, zeta_minus)
}

/// Symplectic eigenvalues `(η₋, η₊)` of the covariance matrix, or of its
/// partial transpose when `partial_transpose` is set.
///
/// Fails with [`Error::InvalidCovariance`] if the quartic invariants are
/// inconsistent beyond numerical tolerance (discriminant or eigenvalue
/// square negative by more than a relative `1e-10`); tiny negative values
/// from roundoff are clamped to zero.
pub fn symplectic_eigenvalues<T: Real>(
    cov: &CovarianceMatrix<T>,
    partial_transpose: bool,
) -> Result<(T, T)> {
    let (a, b, c) = cov.blocks();
    let det_c = if partial_transpose { -c.det() } else { c.det() };
    let delta = a.det() + b.det() + det_c + det_c;
    let det_v = det4(&cov.to_matrix4());

    let four = lit::<T>(4.0);
    let clamp_rel = lit::<T>(1e-10);
    let scale = (delta * delta).max(T::one());

    let mut disc = delta * delta - four * det_v;
    if disc < T::zero() {
        if disc >= -clamp_rel * scale {
            disc = T::zero();
        } else {
            return Err(Error::InvalidCovariance(format!(
                "negative symplectic discriminant {disc:?} for {cov:?}"
            )));
        }
    }
    let root = disc.sqrt();
    let mut less_sq = (delta - root) * half::<T>();
    if less_sq < T::zero() {
        if less_sq >= -clamp_rel * scale {
            less_sq = T::zero();
        } else {
            return Err(Error::InvalidCovariance(format!(
                "negative squared symplectic eigenvalue {less_sq:?} for {cov:?}"
            )));
        }
    }
    let more_sq = (delta + root) * half::<T>();
    if more_sq < T::zero() {
        return Err(Error::InvalidCovariance(format!(
            "negative squared symplectic eigenvalue {more_sq:?} for {cov:?}"
        )));
    }
    Ok((less_sq.sqrt(), more_sq.sqrt()))
}

/// Positivity-of-partial-transpose separability test: `true` iff the state
/// is entangled, i.e. `η̄₋ < 1/2`.
pub fn phs_entangled<T: Real>(cov: &CovarianceMatrix<T>) -> Result<bool> {
    let (eta_bar_less, _) = symplectic_eigenvalues(cov, true)?;
    Ok(eta_bar_less < half())
}

/// Normalization convention for the negativity monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativityConvention {
    /// `N = (1 - 2η̄₋) / (4η̄₋)`: vanishes continuously at the separability
    /// boundary `η̄₋ = 1/2`. The default.
    Standard,
    /// `N = (1 - η̄₋) / (2η̄₋)`: counts the trace-norm contribution of both
    /// symplectic branches; offered for comparison with conventions that
    /// normalize against the pure-state limit.
    DualMode,
}

/// Every entanglement diagnostic for one covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport<T> {
    /// Physical symplectic eigenvalues; `eta_less ≥ 1/2` for a valid state.
    pub eta_less: T,
    pub eta_greater: T,
    /// Partially transposed symplectic eigenvalues.
    pub eta_bar_less: T,
    pub eta_bar_greater: T,
    /// Fourth-order separability invariants.
    pub zeta_plus: T,
    pub zeta_minus: T,
    /// Negativity in the requested convention; zero for separable states.
    pub negativity: T,
    /// Logarithmic negativity `max(0, -ln 2η̄₋)`.
    pub log_negativity: T,
    /// `η̄₋ < 1/2`.
    pub entangled: bool,
}

/// Compute the full set of diagnostics.
pub fn entanglement_report<T: Real>(
    cov: &CovarianceMatrix<T>,
    convention: NegativityConvention,
) -> Result<EntanglementReport<T>> {
    let (eta_less, eta_greater) = symplectic_eigenvalues(cov, false)?;
    let (eta_bar_less, eta_bar_greater) = symplectic_eigenvalues(cov, true)?;
    let (zeta_plus, zeta_minus) = simon_invariants(cov);
    let h = half::<T>();
    let entangled = eta_bar_less < h;
    let two = lit::<T>(2.0);
    let (negativity, log_negativity) = if entangled {
        let n = match convention {
            NegativityConvention::Standard => {
                (T::one() - two * eta_bar_less) / (lit::<T>(4.0) * eta_bar_less)
            }
            NegativityConvention::DualMode => (T::one() - eta_bar_less) / (two * eta_bar_less),
        };
        (n, -(two * eta_bar_less).ln())
    } else {
        (T::zero(), T::zero())
    };
    Ok(EntanglementReport {
        eta_less,
        eta_greater,
        eta_bar_less,
        eta_bar_greater,
        zeta_plus,
        zeta_minus,
        negativity,
        log_negativity,
        entangled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Two-mode squeezed vacuum with squeezing parameter `r`:
    /// A = B = (cosh 2r / 2) I, C = (sinh 2r / 2) diag(1, -1).
    fn squeezed(r: f64) -> CovarianceMatrix<f64> {
        let a = (2.0 * r).cosh() / 2.0;
        let c = (2.0 * r).sinh() / 2.0;
        CovarianceMatrix::from_raw(a, a, a, a, c, 0.0, -c)
    }

    /// Product of two thermal states with symplectic eigenvalues `a`, `b`.
    fn product_thermal(a: f64, b: f64) -> CovarianceMatrix<f64> {
        CovarianceMatrix::from_raw(a, a, b, b, 0.0, 0.0, 0.0)
    }

    #[test]
    fn squeezed_vacuum_spectrum_and_negativity() {
        let report = entanglement_report(&squeezed(0.5), NegativityConvention::Standard).unwrap();
        // Pure state: physical eigenvalues sit exactly on the bound.
        assert_relative_eq!(report.eta_less, 0.5, max_relative = 1e-12);
        assert_relative_eq!(report.eta_greater, 0.5, max_relative = 1e-12);
        // Partial transpose: e^{∓2r} / 2.
        assert_relative_eq!(
            report.eta_bar_less,
            0.18393972058572117,
            max_relative = 1e-14
        );
        assert!(report.entangled);
        // Log-negativity of the squeezed vacuum is exactly 2r.
        assert_relative_eq!(report.log_negativity, 1.0, max_relative = 1e-12);
        assert!(report.zeta_plus < 0.0);
    }

    #[test]
    fn thermal_product_is_separable() {
        let report =
            entanglement_report(&product_thermal(0.5, 2.25), NegativityConvention::Standard)
                .unwrap();
        assert!(!report.entangled);
        assert_eq!(report.negativity, 0.0);
        assert_eq!(report.log_negativity, 0.0);
        assert!(report.zeta_plus >= 0.0);
        assert_relative_eq!(report.eta_bar_less, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn boundary_state_counts_as_separable() {
        // eta_bar_less exactly 1/2: PPT holds, not entangled.
        assert!(!phs_entangled(&product_thermal(0.5, 0.5)).unwrap());
    }

    #[test]
    fn invariant_identities() {
        // zeta_+ - zeta_- = det C and zeta_+ = (eta_bar_-^2 - 1/4)(eta_bar_+^2 - 1/4)
        // for arbitrary stationary-form covariance data.
        let samples = [
            squeezed(0.3),
            squeezed(1.1),
            product_thermal(0.7, 1.9),
            CovarianceMatrix::from_raw(0.52, 2.34, 0.517, 3.35, -0.445, -0.0033, 1.279),
        ];
        for cov in samples {
            let (zp, zm) = simon_invariants(&cov);
            let det_c = cov.block_c().det();
            assert_relative_eq!(zp - zm, det_c, max_relative = 1e-12, epsilon = 1e-14);
            let (el, eg) = symplectic_eigenvalues(&cov, true).unwrap();
            let product = (el * el - 0.25) * (eg * eg - 0.25);
            assert_relative_eq!(zp, product, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn nonnegative_cross_determinant_implies_separable() {
        // det C = v13 v24 + v14² ≥ 0 ⇒ no entanglement.
        let cov = CovarianceMatrix::from_raw(1.2, 1.4, 1.1, 1.3, 0.3, 0.1, 0.4);
        assert!(cov.block_c().det() >= 0.0);
        assert!(!phs_entangled(&cov).unwrap());
    }

    #[test]
    fn spectrum_invariant_under_local_squeezing() {
        // x₁ → s x₁, p₁ → p₁/s is symplectic on mode 1; every eigenvalue,
        // invariant, and monotone must be unchanged. (The v₂₃ = −v₁₄
        // steady-state structure is only closed under one-mode squeezing
        // when v₁₄ = 0, so the base matrix has none.)
        let base = CovarianceMatrix::from_raw(0.52, 2.34, 0.517, 3.35, -0.445, 0.0, 1.279);
        let s = 1.7;
        let squeezed_local = CovarianceMatrix::from_raw(
            s * s * base.v11,
            base.v22 / (s * s),
            base.v33,
            base.v44,
            s * base.v13,
            s * base.v14,
            base.v24 / s,
        );
        let r0 = entanglement_report(&base, NegativityConvention::Standard).unwrap();
        let r1 = entanglement_report(&squeezed_local, NegativityConvention::Standard).unwrap();
        assert_relative_eq!(r0.eta_less, r1.eta_less, max_relative = 1e-12);
        assert_relative_eq!(r0.eta_greater, r1.eta_greater, max_relative = 1e-12);
        assert_relative_eq!(r0.eta_bar_less, r1.eta_bar_less, max_relative = 1e-12);
        assert_relative_eq!(r0.log_negativity, r1.log_negativity, max_relative = 1e-11);
    }

    #[test]
    fn negativity_conventions_differ_by_branch_counting() {
        let cov = squeezed(0.5);
        let std = entanglement_report(&cov, NegativityConvention::Standard).unwrap();
        let dual = entanglement_report(&cov, NegativityConvention::DualMode).unwrap();
        let eta = std.eta_bar_less;
        assert_relative_eq!(
            std.negativity,
            (1.0 - 2.0 * eta) / (4.0 * eta),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            dual.negativity,
            (1.0 - eta) / (2.0 * eta),
            max_relative = 1e-14
        );
        assert_eq!(std.log_negativity, dual.log_negativity);
    }

    #[test]
    fn pure_state_purity_relation() {
        // For any pure Gaussian state det V = 1/16 and η₋η₊ = 1/4.
        for r in [0.1, 0.6, 1.3] {
            let cov = squeezed(r);
            let (el, eg) = symplectic_eigenvalues(&cov, false).unwrap();
            assert_relative_eq!(el * eg, 0.25, max_relative = 1e-12);
            assert_relative_eq!(det4(&cov.to_matrix4()), 0.0625, max_relative = 1e-11);
        }
    }

    #[test]
    fn deeply_invalid_matrix_is_rejected() {
        // det V strongly negative: no clamp should rescue this.
        let junk = CovarianceMatrix::from_raw(1.0, 1.0, 1.0, 1.0, 10.0, 0.0, -10.0);
        assert!(symplectic_eigenvalues(&junk, false).is_err());
    }
}
