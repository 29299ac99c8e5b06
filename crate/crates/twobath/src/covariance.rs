//! Late-time covariance matrix of the coupled pair from frequency-space
//! integration.
//!
//! In the stationary state every second moment is an integral of the
//! response matrix against the bath noise kernels. Folding the full-line
//! integrals onto `[0, ∞)` (the response conjugates and the kernels are even
//! under `ω → -ω`) and writing `d_ij` for the response entries and `K_a` for
//! the kernels:
//!
//! ```text
//! v11 = <x₁²>      = 1/(π m²) ∫ ( |d11|² K₁ + |d12|² K₂ ) dω
//! v22 = <p₁²>      = 1/π      ∫ ω² ( |d11|² K₁ + |d12|² K₂ ) dω
//! v13 = <x₁x₂>     = 1/(π m²) ∫ Re( d11* d21 K₁ + d12* d22 K₂ ) dω
//! v24 = <p₁p₂>     = 1/π      ∫ ω² Re( d11* d21 K₁ + d12* d22 K₂ ) dω
//! v14 = <x₁p₂>sym  = 1/(π m)  ∫ ω  Im( d11* d21 K₁ + d12* d22 K₂ ) dω
//! ```
//!
//! with `v33`, `v44` the second-row analogues of `v11`, `v22`. The remaining
//! entries are fixed by stationarity: `<x₁p₁>sym = <x₂p₂>sym = 0` and
//! `<p₁x₂>sym = -<x₁p₂>sym`. All seven independent integrands share their
//! sample points through the vector quadrature engine.

use crate::entanglement::symplectic_eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::model::{dmatrix, hadamard_kernel, BathParams, SystemParams};
use crate::quadrature::{integrate_vector, Peak, QuadratureConfig};
use crate::scalar::{half, lit, Real};

/// A fully specified steady-state computation: the oscillator pair, its two
/// baths, and the integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateProblem<T> {
    pub system: SystemParams<T>,
    pub bath1: BathParams<T>,
    pub bath2: BathParams<T>,
    pub quadrature: QuadratureConfig<T>,
}

impl<T: Real> SteadyStateProblem<T> {
    /// Bundle the parameters, rejecting a completely undamped pair (which
    /// never reaches a stationary state).
    pub fn new(
        system: SystemParams<T>,
        bath1: BathParams<T>,
        bath2: BathParams<T>,
        quadrature: QuadratureConfig<T>,
    ) -> Result<Self> {
        if !(bath1.effective_damping() + bath2.effective_damping() > T::zero()) {
            return Err(Error::Domain(
                "at least one bath must have nonzero effective damping for a steady state".into(),
            ));
        }
        Ok(Self {
            system,
            bath1,
            bath2,
            quadrature,
        })
    }
}

/// The seven independent second moments of the stationary Gaussian state, in
/// phase-space order `(x₁, p₁, x₂, p₂)`.
///
/// `v14` is the symmetrized `<x₁p₂>`; the matrix entry `<p₁x₂>` equals
/// `-v14` and `<x₁p₁>`, `<x₂p₂>`, i.e. `v12` and `v34`, vanish identically
/// in the stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T> {
    pub v11: T,
    pub v22: T,
    pub v33: T,
    pub v44: T,
    pub v13: T,
    pub v14: T,
    pub v24: T,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Construct with basic sanity checks: all entries finite, diagonal
    /// (variance) entries strictly positive. Deeper physicality (the
    /// uncertainty bound) is checked where a quantum state is actually
    /// asserted, since closed-form approximations and classical-kernel
    /// results may legitimately violate it.
    pub fn new(v11: T, v22: T, v33: T, v44: T, v13: T, v14: T, v24: T) -> Result<Self> {
        let m = Self::from_raw(v11, v22, v33, v44, v13, v14, v24);
        for x in m.elements() {
            if !x.is_finite() {
                return Err(Error::InvalidCovariance(format!(
                    "non-finite covariance element in {m:?}"
                )));
            }
        }
        if !(v11 > T::zero() && v22 > T::zero() && v33 > T::zero() && v44 > T::zero()) {
            return Err(Error::InvalidCovariance(format!(
                "variances must be strictly positive, got {m:?}"
            )));
        }
        Ok(m)
    }

    /// Construct without any validation.
    pub fn from_raw(v11: T, v22: T, v33: T, v44: T, v13: T, v14: T, v24: T) -> Self {
        Self {
            v11,
            v22,
            v33,
            v44,
            v13,
            v14,
            v24,
        }
    }

    /// Elements in the fixed order `(v11, v22, v33, v44, v13, v14, v24)`.
    pub fn elements(&self) -> [T; 7] {
        [
            self.v11, self.v22, self.v33, self.v44, self.v13, self.v14, self.v24,
        ]
    }

    /// Local block of oscillator 1, `diag(v11, v22)`.
    pub fn block_a(&self) -> Mat2<T> {
        Mat2::diag(self.v11, self.v22)
    }

    /// Local block of oscillator 2, `diag(v33, v44)`.
    pub fn block_b(&self) -> Mat2<T> {
        Mat2::diag(self.v33, self.v44)
    }

    /// Cross block `C = [[v13, v14], [-v14, v24]]` coupling the two modes.
    pub fn block_c(&self) -> Mat2<T> {
        Mat2([[self.v13, self.v14], [-self.v14, self.v24]])
    }

    /// `(A, B, C)` blocks of the 4×4 matrix `[[A, C], [Cᵀ, B]]`.
    pub fn blocks(&self) -> (Mat2<T>, Mat2<T>, Mat2<T>) {
        (self.block_a(), self.block_b(), self.block_c())
    }

    /// The full symmetric 4×4 matrix in `(x₁, p₁, x₂, p₂)` order.
    pub fn to_matrix4(&self) -> [[T; 4]; 4] {
        let z = T::zero();
        [
            [self.v11, z, self.v13, self.v14],
            [z, self.v22, -self.v14, self.v24],
            [self.v13, -self.v14, self.v33, z],
            [self.v14, self.v24, z, self.v44],
        ]
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kernel {
    /// Full symmetrized quantum noise, `2 m γ ω coth(ω β / 2)`.
    Hadamard,
    /// Frequency-independent classical white noise, `4 m γ / β` — the
    /// `ω β → 0` limit of the quantum kernel, used by the residue-based
    /// classical oracle.
    ClassicalWhite,
}

/// Stationary covariance matrix with the full quantum noise kernels.
///
/// Fails with [`Error::HeisenbergViolation`] if the integrated state falls
/// below the uncertainty bound by more than numerical tolerance — that
/// indicates an integration failure, not physics.
pub fn steady_covariance<T: Real>(problem: &SteadyStateProblem<T>) -> Result<CovarianceMatrix<T>> {
    let cov = steady_state_with_kernel(problem, Kernel::Hadamard)?;
    let (eta_less, _) = symplectic_eigenvalues(&cov, false)?;
    if eta_less < half::<T>() - lit(1e-6) {
        return Err(Error::HeisenbergViolation {
            eta_less: eta_less.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(cov)
}

/// Stationary covariance matrix with flat classical kernels `4 m γ_a / β_a`.
///
/// This is a classical object: it is *expected* to violate the quantum
/// uncertainty bound at low temperature, so no such check is applied. Its
/// infinite-cutoff limit is known in closed form (see the residue oracle),
/// which makes it the cross-validation target for the quadrature engine.
pub fn steady_covariance_classical_kernel<T: Real>(
    problem: &SteadyStateProblem<T>,
) -> Result<CovarianceMatrix<T>> {
    steady_state_with_kernel(problem, Kernel::ClassicalWhite)
}

fn steady_state_with_kernel<T: Real>(
    problem: &SteadyStateProblem<T>,
    kernel: Kernel,
) -> Result<CovarianceMatrix<T>> {
    let sys = problem.system;
    let mass = sys.mass();
    let g1 = problem.bath1.effective_damping();
    let g2 = problem.bath2.effective_damping();
    if !(g1 + g2 > T::zero()) {
        return Err(Error::Domain(
            "at least one bath must have nonzero effective damping for a steady state".into(),
        ));
    }
    let (b1, b2) = (problem.bath1.beta(), problem.bath2.beta());
    let four = lit::<T>(4.0);
    let (flat1, flat2) = (four * mass * g1 / b1, four * mass * g2 / b2);

    let peaks: Vec<Peak<T>> = sys
        .complex_mode_frequencies(g1, g2)
        .iter()
        .map(|z| Peak {
            center: z.re,
            halfwidth: z.im,
        })
        .collect();

    let integrand = |w: T| -> Result<[T; 7]> {
        let d = dmatrix(&sys, g1, g2, w)?;
        let (k1, k2) = match kernel {
            Kernel::Hadamard => (
                hadamard_kernel(mass, g1, b1, w),
                hadamard_kernel(mass, g2, b2, w),
            ),
            Kernel::ClassicalWhite => (flat1, flat2),
        };
        let r1 = d.d11.norm_sqr() * k1 + d.d12.norm_sqr() * k2;
        let r2 = d.d21.norm_sqr() * k1 + d.d22.norm_sqr() * k2;
        let cross = d.d11.conj() * d.d21 * k1 + d.d12.conj() * d.d22 * k2;
        let w2 = w * w;
        Ok([
            r1,
            w2 * r1,
            r2,
            w2 * r2,
            cross.re,
            w2 * cross.re,
            w * cross.im,
        ])
    };

    let q = integrate_vector::<T, 7, _>(integrand, &peaks, &problem.quadrature)?;
    let inv_pi = T::one() / T::PI();
    let inv_pi_m2 = inv_pi / (mass * mass);
    let inv_pi_m = inv_pi / mass;
    CovarianceMatrix::new(
        q.values[0] * inv_pi_m2,
        q.values[1] * inv_pi,
        q.values[2] * inv_pi_m2,
        q.values[3] * inv_pi,
        q.values[4] * inv_pi_m2,
        q.values[6] * inv_pi_m,
        q.values[5] * inv_pi,
    )
}
