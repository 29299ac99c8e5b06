//! Closed-form classical-limit covariance by residue summation.
//!
//! In the classical (high-temperature) limit the noise kernels flatten,
//! `K_a(ω) → 4 m γ_a / β_a`, so every covariance integrand becomes a
//! rational function of ω with denominator `det(ω)·det(−ω)`, where
//! `det(ω) = N₁(ω)N₂(ω) − σ²` and `N_a(ω) = −ω² + Ω² − 2iωγ_a` is the
//! inverse single-oscillator response. The two-sided integrals are then
//! exact sums over the four upper-half-plane poles — the roots of
//! `q(ω) := det(−ω)` (the roots of `det` itself lie in the lower half-plane
//! for a damped, causal response). No frequency cutoff is involved, which is
//! what makes this an independent check on the quadrature pipeline.
//!
//! For a numerator polynomial `R(ω)` the two-sided integral closed in the
//! upper half-plane is
//!
//! ```text
//! (1/2π) ∫ R(ω) / (det(ω) q(ω)) dω  =  i · Σ_k R(u_k) / (det(u_k) q′(u_k))
//! ```
//!
//! with `u_k` the simple roots of `q`. The position-position and
//! momentum-momentum rows use numerators even under `ω → −ω` conjugation, so
//! their sums come out real; the position-momentum element `V₁₄` integrates
//! `ω·Im[cross]` and is read off the imaginary part instead.

use num_complex::Complex;

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::model::{BathParams, SystemParams};
use crate::scalar::{lit, Real};

/// Classical-limit covariance plus the pole diagnostics behind it.
#[derive(Debug, Clone)]
pub struct ClassicalLimitResult<T> {
    pub covariance: CovarianceMatrix<T>,
    /// The four upper-half-plane poles `u_k` of the shared spectral kernel
    /// `1/(det(ω)·det(−ω))`, paired with that kernel's residue
    /// `1/(det(u_k)·q′(u_k))` at each. Every covariance element is a
    /// numerator-weighted sum over exactly these pairs.
    pub pole_residues: Vec<(Complex<T>, Complex<T>)>,
}

/// Horner evaluation of a polynomial given by descending coefficients.
fn poly_eval<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// Derivative coefficients (descending order in, descending order out).
fn poly_derivative<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex::new(lit::<T>((n - i) as f64), T::zero()))
        .collect()
}

/// Minimum pairwise distance below which poles are treated as degenerate.
const DEGENERACY_SEPARATION: f64 = 1e-8;

/// All simple roots of a monic quartic by the Durand–Kerner simultaneous
/// iteration (followed by the residue machinery, this sidesteps pulling a
/// dense eigen-solver in for one fixed-degree polynomial). Numerically
/// coincident roots stall the iteration and are reported as degenerate.
fn quartic_roots<T: Real>(coeffs: &[Complex<T>; 5]) -> Result<[Complex<T>; 4]> {
    debug_assert!(coeffs[0] == Complex::new(T::one(), T::zero()));
    // Cauchy bound on root magnitude for the starting circle.
    let mut radius = T::one();
    for c in &coeffs[1..] {
        radius = radius.max(c.norm());
    }
    radius = radius + T::one();
    // Standard non-real, non-symmetric starting points: powers of 0.4+0.9i.
    let seed = Complex::new(lit::<T>(0.4), lit::<T>(0.9));
    let mut z = [seed; 4];
    for j in 1..4 {
        z[j] = z[j - 1] * seed;
    }
    for zj in z.iter_mut() {
        let norm = zj.norm();
        *zj = *zj * Complex::new(radius / norm, T::zero());
    }

    let tol = lit::<T>(1e-13);
    let mut converged = false;
    'outer: for _ in 0..256 {
        let mut worst = T::zero();
        for j in 0..4 {
            let mut denom = Complex::new(T::one(), T::zero());
            for k in 0..4 {
                if k != j {
                    denom = denom * (z[j] - z[k]);
                }
            }
            if denom.norm() == T::zero() {
                // Two approximants collided exactly: degenerate.
                break 'outer;
            }
            let delta = poly_eval(coeffs, z[j]) / denom;
            z[j] = z[j] - delta;
            worst = worst.max(delta.norm() / (T::one() + z[j].norm()));
        }
        if worst <= tol {
            converged = true;
            break;
        }
    }

    let mut min_sep = T::infinity();
    for j in 0..4 {
        for k in (j + 1)..4 {
            min_sep = min_sep.min((z[j] - z[k]).norm());
        }
    }
    if !converged || min_sep < lit(DEGENERACY_SEPARATION) {
        return Err(Error::DegeneratePoles {
            separation: min_sep.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(z)
}

/// Exact steady-state covariance in the classical flat-kernel limit
/// `K_a(ω) = 4 m γ_a / β_a`, by residue summation over the four
/// upper-half-plane spectral poles.
///
/// The damping rates are the baths' effective rates (including any
/// temperature dependence). Requires positive total damping; poles that are
/// not strictly in the upper half-plane (an undamped mode — e.g. a fully
/// decoupled oscillator with its own γ = 0) mean no steady state exists and
/// are rejected. Numerically coincident poles (within 1e-8) are reported as
/// [`Error::DegeneratePoles`]; perturb the parameters to resolve them.
pub fn classical_covariance<T: Real>(
    sys: &SystemParams<T>,
    bath1: &BathParams<T>,
    bath2: &BathParams<T>,
) -> Result<ClassicalLimitResult<T>> {
    let g1 = bath1.effective_damping();
    let g2 = bath2.effective_damping();
    if !(g1 + g2 > T::zero()) {
        return Err(Error::Domain(
            "classical limit requires positive total damping".into(),
        ));
    }
    let m = sys.mass();
    let om2 = sys.omega() * sys.omega();
    let sigma = sys.sigma();
    let four = lit::<T>(4.0);
    let two = lit::<T>(2.0);
    let c1 = four * m * g1 / bath1.beta();
    let c2 = four * m * g2 / bath2.beta();
    let gs = g1 + g2;

    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);

    // det(ω) = N₁N₂ − σ² as a quartic, descending coefficients.
    let det_coeffs = [
        re(T::one()),
        im(two * gs),
        re(-(two * om2 + four * g1 * g2)),
        im(-two * om2 * gs),
        re(om2 * om2 - sigma * sigma),
    ];
    // q(ω) = det(−ω): odd coefficients flip sign.
    let q_coeffs = [
        det_coeffs[0],
        -det_coeffs[1],
        det_coeffs[2],
        -det_coeffs[3],
        det_coeffs[4],
    ];
    let qprime = poly_derivative(&q_coeffs);

    let poles = quartic_roots(&q_coeffs)?;
    for u in &poles {
        if !(u.im > T::zero()) {
            return Err(Error::Domain(format!(
                "spectral pole at {} + {}i is not strictly in the upper \
                 half-plane: an undamped mode has no steady state",
                u.re.to_f64().unwrap_or(f64::NAN),
                u.im.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }

    let zero = Complex::new(T::zero(), T::zero());
    let (mut s11, mut s22, mut s33, mut s44) = (zero, zero, zero, zero);
    let (mut s13, mut s14, mut s24) = (zero, zero, zero);
    let mut pole_residues = Vec::with_capacity(4);
    for &u in &poles {
        let w = (poly_eval(&det_coeffs, u) * poly_eval(&qprime, u)).inv();
        pole_residues.push((u, w));
        // N_a(±u) with N_a(ω) = −ω² + Ω² − 2iωγ_a.
        let u2 = u * u;
        let n1u = -u2 + re(om2) - im(two * g1) * u;
        let n1mu = -u2 + re(om2) + im(two * g1) * u;
        let n2u = -u2 + re(om2) - im(two * g2) * u;
        let n2mu = -u2 + re(om2) + im(two * g2) * u;
        let r1 = n2u * n2mu * re(c1) + re(sigma * sigma * c2);
        let r2 = re(sigma * sigma * c1) + n1u * n1mu * re(c2);
        let rc = -re(sigma) * (n2mu * re(c1) + n1u * re(c2));
        s11 = s11 + r1 * w;
        s22 = s22 + u2 * r1 * w;
        s33 = s33 + r2 * w;
        s44 = s44 + u2 * r2 * w;
        s13 = s13 + rc * w;
        s14 = s14 + u * rc * w;
        s24 = s24 + u2 * rc * w;
    }

    let i = im(T::one());
    let (c11, c22, c33, c44) = (i * s11, i * s22, i * s33, i * s44);
    let (c13, c14, c24) = (i * s13, i * s14, i * s24);

    let m2 = m * m;
    let v11 = c11.re / m2;
    let v22 = c22.re;
    let v33 = c33.re / m2;
    let v44 = c44.re;
    let v13 = c13.re / m2;
    // V₁₄ integrates ω·Im[cross]: the value lives in the imaginary part.
    let v14 = c14.im / m;
    let v24 = c24.re;

    // Realness: the discarded parts must vanish. Identically-zero elements
    // (V₂₄, and V₁₄ for equal baths) have no magnitude of their own, so the
    // tolerance is anchored to the covariance scale.
    let scale = [v11, v22, v33, v44, v13, v14, v24]
        .iter()
        .fold(T::zero(), |a, &x| a.max(x.abs()));
    let spurious = [c11.im, c22.im, c33.im, c44.im, c13.im, c14.re, c24.im]
        .iter()
        .fold(T::zero(), |a, &x| a.max(x.abs()));
    if !(spurious <= lit::<T>(1e-12) * scale) {
        return Err(Error::Domain(format!(
            "residue sums have spurious imaginary part {} at covariance scale {}",
            spurious.to_f64().unwrap_or(f64::NAN),
            scale.to_f64().unwrap_or(f64::NAN)
        )));
    }

    Ok(ClassicalLimitResult {
        covariance: CovarianceMatrix::from_raw(v11, v22, v33, v44, v13, v14, v24),
        pole_residues,
    })
}
