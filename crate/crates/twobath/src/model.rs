//! Physical parameters, the frequency-domain response matrix, and the bath
//! noise kernels.
//!
//! Two identical oscillators (mass `m`, bare frequency `Ω`) are coupled
//! bilinearly with strength `σ` and damped by independent Ohmic baths. In
//! frequency space the displacement response to the bath forces is
//!
//! ```text
//! D(ω) = ( -ω² I + [[Ω², σ], [σ, Ω²]] - 2iω diag(γ₁, γ₂) )⁻¹
//! ```
//!
//! and each bath drives its oscillator with the symmetrized noise spectrum
//! `K_a(ω) = 2 m γ_a ω coth(ω β_a / 2)` at inverse temperature `β_a`.
//! Damping may carry a power-law temperature dependence,
//! `γ_a = γ̄_a β_a^{-α_a}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{half, lit, Real};

/// Mass, bare frequency, and bilinear coupling of the oscillator pair.
///
/// Stability of the coupled system requires `Ω² > |σ|`, i.e. both normal
/// mode frequencies `Ω± = √(Ω² ± σ)` real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    mass: T,
    omega: T,
    sigma: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(mass: T, omega: T, sigma: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::Domain(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "bare frequency must be positive and finite, got {omega}"
            )));
        }
        if !(omega * omega > sigma.abs()) {
            return Err(Error::Domain(format!(
                "coupling must satisfy omega^2 > |sigma| for stability, got omega^2 = {} vs |sigma| = {}",
                omega * omega,
                sigma.abs()
            )));
        }
        Ok(Self { mass, omega, sigma })
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Normal mode frequencies `Ω± = √(Ω² ± σ)` of the undamped pair.
    pub fn normal_modes(&self) -> NormalModes<T> {
        let w2 = self.omega * self.omega;
        NormalModes {
            omega_plus: (w2 + self.sigma).sqrt(),
            omega_minus: (w2 - self.sigma).sqrt(),
        }
    }

    /// Damped mode frequencies `Ω± + i (γ₁ + γ₂)/2` in the upper half-plane.
    ///
    /// Exact for the resonance *positions* to leading order in the damping;
    /// used to seed the integrator with the location and width of the two
    /// spectral peaks.
    pub fn complex_mode_frequencies(&self, gamma1: T, gamma2: T) -> [Complex<T>; 2] {
        let modes = self.normal_modes();
        let hw = (gamma1 + gamma2) * half();
        [
            Complex::new(modes.omega_plus, hw),
            Complex::new(modes.omega_minus, hw),
        ]
    }
}

/// Undamped normal mode frequencies, `omega_plus = √(Ω²+σ)` and
/// `omega_minus = √(Ω²-σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModes<T> {
    pub omega_plus: T,
    pub omega_minus: T,
}

/// One bath: damping prefactor `γ̄`, temperature exponent `α`, and inverse
/// temperature `β`. The effective damping felt by the oscillator is
/// `γ = γ̄ β^{-α}` (i.e. `γ̄ T^α`); `α = 0` recovers a constant damping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams<T> {
    gamma_bar: T,
    alpha: T,
    beta: T,
}

impl<T: Real> BathParams<T> {
    pub fn new(gamma_bar: T, alpha: T, beta: T) -> Result<Self> {
        if !(gamma_bar >= T::zero()) || !gamma_bar.is_finite() {
            return Err(Error::Domain(format!(
                "damping prefactor must be nonnegative and finite, got {gamma_bar}"
            )));
        }
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "temperature exponent must be nonnegative and finite, got {alpha}"
            )));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "inverse temperature must be positive and finite, got {beta}"
            )));
        }
        Ok(Self {
            gamma_bar,
            alpha,
            beta,
        })
    }

    pub fn gamma_bar(&self) -> T {
        self.gamma_bar
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Same bath at a different inverse temperature.
    pub fn with_beta(&self, beta: T) -> Result<Self> {
        Self::new(self.gamma_bar, self.alpha, beta)
    }

    /// Effective damping rate `γ = γ̄ β^{-α}` at this bath's temperature.
    pub fn effective_damping(&self) -> T {
        if self.alpha == T::zero() {
            // Avoid powf noise in the common constant-damping case.
            self.gamma_bar
        } else {
            self.gamma_bar * self.beta.powf(-self.alpha)
        }
    }

    /// Whether the effective damping is small compared to the slow normal
    /// mode, `γ < Ω₋`. The covariance integrals remain well defined beyond
    /// this regime, but the spectral peaks merge and the closed-form
    /// approximations lose meaning.
    pub fn is_weakly_damped(&self, system: &SystemParams<T>) -> bool {
        self.effective_damping() < system.normal_modes().omega_minus
    }
}

/// The 2×2 displacement response matrix at one frequency.
///
/// Symmetric (`d12 = d21`); `d11` carries the damping of the *other*
/// oscillator in its numerator because the inverse of a 2×2 matrix swaps the
/// diagonal.
#[derive(Debug, Clone, Copy)]
pub struct SpectralMatrix<T> {
    pub d11: Complex<T>,
    pub d12: Complex<T>,
    pub d21: Complex<T>,
    pub d22: Complex<T>,
}

/// Invert `-ω² I + [[Ω², σ], [σ, Ω²]] - 2iω diag(γ₁, γ₂)` at frequency `ω`.
///
/// Fails with [`Error::SingularResponse`] only when the determinant is
/// exactly zero, which requires both dampings to vanish and `ω` to sit on a
/// normal mode.
pub fn dmatrix<T: Real>(
    system: &SystemParams<T>,
    gamma1: T,
    gamma2: T,
    omega: T,
) -> Result<SpectralMatrix<T>> {
    let w2 = system.omega * system.omega;
    let base = w2 - omega * omega;
    let two_w = omega + omega;
    let m11 = Complex::new(base, -(two_w * gamma1));
    let m22 = Complex::new(base, -(two_w * gamma2));
    let sigma = Complex::new(system.sigma, T::zero());
    let det = m11 * m22 - sigma * sigma;
    if det.norm_sqr() == T::zero() {
        return Err(Error::SingularResponse {
            omega: omega.to_f64().unwrap_or(f64::NAN),
        });
    }
    let off = -sigma / det;
    Ok(SpectralMatrix {
        d11: m22 / det,
        d12: off,
        d21: off,
        d22: m11 / det,
    })
}

/// Symmetrized bath noise kernel `K(ω) = 2 m γ ω coth(ω β / 2)`.
///
/// Even in `ω`, strictly positive, with limits `K(0) = 4 m γ / β`
/// (classical white noise) and `K(ω) → 2 m γ |ω|` as `β → ∞` (zero-point
/// noise). Near `ω = 0` the product `ω coth(ω β / 2)` is evaluated by its
/// Laurent series to avoid 0/0.
pub fn hadamard_kernel<T: Real>(mass: T, gamma: T, beta: T, omega: T) -> T {
    let two = lit::<T>(2.0);
    two * mass * gamma * omega_coth_half(beta, omega)
}

/// `ω coth(ω β / 2)`, series-expanded for `|ω β / 2| < 1e-6`:
/// `2/β + ω² β / 6 - ω⁴ β³ / 360 + O(ω⁶)`.
fn omega_coth_half<T: Real>(beta: T, omega: T) -> T {
    let x = omega * beta * half::<T>();
    if x.abs() < lit(1e-6) {
        let two = lit::<T>(2.0);
        let w2 = omega * omega;
        two / beta + w2 * beta / lit(6.0) - w2 * w2 * beta * beta * beta / lit(360.0)
    } else {
        omega / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_relative_eq, relative_eq};

    fn figure_system() -> SystemParams<f64> {
        SystemParams::new(1.0, 5.0, 24.0).unwrap()
    }

    #[test]
    fn constructor_validation() {
        assert!(SystemParams::new(0.0, 5.0, 24.0).is_err());
        assert!(SystemParams::new(1.0, -5.0, 24.0).is_err());
        // |sigma| = omega^2 is marginal: one normal mode frequency hits zero.
        assert!(SystemParams::new(1.0, 5.0, 25.0).is_err());
        assert!(SystemParams::new(1.0, 5.0, -25.0).is_err());
        assert!(SystemParams::new(1.0, 5.0, -24.0).is_ok());

        assert!(BathParams::new(-0.1, 0.0, 1.0).is_err());
        assert!(BathParams::new(0.1, -1.0, 1.0).is_err());
        assert!(BathParams::new(0.1, 0.0, 0.0).is_err());
        assert!(BathParams::new(0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn normal_modes_of_reference_system() {
        let modes = figure_system().normal_modes();
        assert_eq!(modes.omega_plus, 7.0);
        assert_eq!(modes.omega_minus, 1.0);
    }

    #[test]
    fn complex_mode_frequencies_carry_mean_halfwidth() {
        let freqs = figure_system().complex_mode_frequencies(0.005, 0.25);
        assert_eq!(freqs[0].re, 7.0);
        assert_eq!(freqs[1].re, 1.0);
        assert_relative_eq!(freqs[0].im, 0.1275, max_relative = 1e-15);
        assert_eq!(freqs[0].im, freqs[1].im);
    }

    #[test]
    fn effective_damping_power_law() {
        let bath = BathParams::new(0.25, 1.0, 0.01).unwrap();
        // gamma = gamma_bar * T = 0.25 / 0.01
        assert_relative_eq!(bath.effective_damping(), 25.0, max_relative = 1e-14);
        let constant = BathParams::new(0.25, 0.0, 0.01).unwrap();
        assert_eq!(constant.effective_damping(), 0.25);
        let sqrt_law = BathParams::new(0.1, 0.5, 4.0).unwrap();
        assert_relative_eq!(sqrt_law.effective_damping(), 0.05, max_relative = 1e-14);
    }

    #[test]
    fn weak_damping_advisory() {
        let sys = figure_system(); // omega_minus = 1
        assert!(BathParams::new(0.25, 0.0, 1.0).unwrap().is_weakly_damped(&sys));
        assert!(!BathParams::new(1.5, 0.0, 1.0).unwrap().is_weakly_damped(&sys));
        // Temperature dependence can push a nominally weak bath out of regime.
        let hot = BathParams::new(0.25, 1.0, 0.01).unwrap();
        assert!(!hot.is_weakly_damped(&sys));
    }

    #[test]
    fn static_response_value() {
        // At omega = 0 the damping drops out: d11 = Omega^2 / (Omega^4 - sigma^2).
        let d = dmatrix(&figure_system(), 0.005, 0.25, 0.0).unwrap();
        assert_relative_eq!(d.d11.re, 0.5102040816326531, max_relative = 1e-15);
        assert_eq!(d.d11.im, 0.0);
        assert_relative_eq!(d.d12.re, -24.0 / 49.0, max_relative = 1e-15);
    }

    #[test]
    fn diagonal_swap_in_response() {
        // d11 carries gamma2, d22 carries gamma1.
        let sys = figure_system();
        let d = dmatrix(&sys, 0.005, 0.25, 2.0).unwrap();
        let m11 = Complex::new(25.0 - 4.0, -2.0 * 2.0 * 0.005);
        let m22 = Complex::new(25.0 - 4.0, -2.0 * 2.0 * 0.25);
        let det = m11 * m22 - Complex::new(24.0 * 24.0, 0.0);
        assert_relative_eq!(d.d11.re, (m22 / det).re, max_relative = 1e-14);
        assert_relative_eq!(d.d11.im, (m22 / det).im, max_relative = 1e-14);
        assert_relative_eq!(d.d22.re, (m11 / det).re, max_relative = 1e-14);
        assert_relative_eq!(d.d22.im, (m11 / det).im, max_relative = 1e-14);
    }

    #[test]
    fn response_inverts_the_kernel_matrix() {
        let sys = figure_system();
        let (g1, g2) = (0.005, 0.25);
        for &w in &[0.3, 1.0, 2.7, 6.9, 7.0, 55.0] {
            let d = dmatrix(&sys, g1, g2, w).unwrap();
            let m11 = Complex::new(25.0 - w * w, -2.0 * w * g1);
            let m22 = Complex::new(25.0 - w * w, -2.0 * w * g2);
            let s = Complex::new(24.0, 0.0);
            // M * D must be the identity.
            let i11 = m11 * d.d11 + s * d.d21;
            let i12 = m11 * d.d12 + s * d.d22;
            let i21 = s * d.d11 + m22 * d.d21;
            let i22 = s * d.d12 + m22 * d.d22;
            assert!(relative_eq!(i11.re, 1.0, max_relative = 1e-12));
            assert!(i11.im.abs() < 1e-12);
            assert!(i12.norm() < 1e-12);
            assert!(i21.norm() < 1e-12);
            assert!(relative_eq!(i22.re, 1.0, max_relative = 1e-12));
        }
    }

    #[test]
    fn response_conjugates_under_frequency_reflection() {
        let sys = figure_system();
        for &w in &[0.1, 1.0, 4.2, 7.0, 12.0] {
            let d = dmatrix(&sys, 0.005, 0.25, w).unwrap();
            let dm = dmatrix(&sys, 0.005, 0.25, -w).unwrap();
            assert_relative_eq!(dm.d11.re, d.d11.re, max_relative = 1e-15);
            assert_relative_eq!(dm.d11.im, -d.d11.im, max_relative = 1e-15);
            assert_relative_eq!(dm.d12.re, d.d12.re, max_relative = 1e-15);
            assert_relative_eq!(dm.d12.im, -d.d12.im, max_relative = 1e-15);
        }
    }

    #[test]
    fn undamped_resonance_is_singular() {
        // With both dampings zero, omega = omega_plus = 7 makes the
        // determinant exactly zero in binary arithmetic.
        let err = dmatrix(&figure_system(), 0.0, 0.0, 7.0).unwrap_err();
        match err {
            Error::SingularResponse { omega } => assert_eq!(omega, 7.0),
            other => panic!("expected SingularResponse, got {other:?}"),
        }
        // Any damping regularizes it.
        assert!(dmatrix(&figure_system(), 1e-12, 0.0, 7.0).is_ok());
    }

    #[test]
    fn kernel_spot_value_and_limits() {
        // m = 1, gamma = 1/2, beta = 2, omega = 1: K = coth(1).
        assert_relative_eq!(
            hadamard_kernel(1.0, 0.5, 2.0, 1.0),
            1.3130352854993315,
            max_relative = 1e-15
        );
        // omega -> 0: K -> 4 m gamma / beta, exactly representable here.
        assert_eq!(hadamard_kernel(1.0, 0.25, 0.5, 0.0), 2.0);
        // beta -> infinity: K -> 2 m gamma |omega|.
        assert_relative_eq!(
            hadamard_kernel(1.0, 0.25, 1e12, 3.0),
            1.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            hadamard_kernel(1.0, 0.25, 1e12, -3.0),
            1.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn kernel_even_and_positive() {
        for &w in &[1e-9, 1e-7, 0.01, 1.0, 40.0] {
            let k = hadamard_kernel(1.3, 0.17, 2.5, w);
            let km = hadamard_kernel(1.3, 0.17, 2.5, -w);
            assert_relative_eq!(k, km, max_relative = 1e-15);
            assert!(k > 0.0);
        }
    }

    #[test]
    fn kernel_series_matches_direct_branch_at_crossover() {
        // Just inside and just outside the series window, against the
        // closed form evaluated in extended precision via the direct branch.
        let beta = 1.0;
        let below = 1.9e-6; // x = 0.95e-6 < 1e-6 -> series
        let above = 2.1e-6; // x = 1.05e-6 -> direct
        let k_below = hadamard_kernel(1.0, 1.0, beta, below);
        let k_above = hadamard_kernel(1.0, 1.0, beta, above);
        // Both sit on the smooth function 2 m gamma (2/beta + w^2 beta/6 + ...)
        let smooth = |w: f64| 2.0 * (2.0 / beta + w * w * beta / 6.0);
        assert_relative_eq!(k_below, smooth(below), max_relative = 1e-13);
        assert_relative_eq!(k_above, smooth(above), max_relative = 1e-13);
    }
}
