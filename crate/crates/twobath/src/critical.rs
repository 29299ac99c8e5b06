//! Entanglement phase boundaries: the critical inverse temperature of one
//! bath, with the other held fixed, and sweeps of it into critical lines.
//!
//! The boundary is where the smallest partially transposed symplectic
//! eigenvalue crosses the separability bound, `η̄₋(V(β)) = 1/2`
//! (equivalently, where the invariant `ζ₊` crosses zero). The damping rates
//! entering both the response matrix and the noise kernels are the baths'
//! effective, possibly temperature-dependent rates `γ̄ β^{-α}`, re-evaluated
//! at every trial temperature.
//!
//! Root finding is plain bisection under automatic geometric bracket
//! expansion (up to 10³× each way): the criterion is expensive but smooth,
//! and bisection is immune to the ~1e-9 quadrature noise floor. When no sign
//! change exists in the fully expanded bracket the solver reports which side
//! of the boundary the whole bracket sits on ("always entangled" /
//! "always separable") instead of failing opaquely.

use rayon::prelude::*;

use crate::covariance::{steady_covariance, SteadyStateProblem};
use crate::entanglement::{simon_invariants, symplectic_eigenvalues};
use crate::error::{Error, Result};
use crate::model::{BathParams, SystemParams};
use crate::quadrature::QuadratureConfig;
use crate::scalar::{half, lit, Real};

/// Which bath's inverse temperature is held fixed; the other is solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedBath {
    Bath1,
    Bath2,
}

/// Zero-crossing used to define the boundary. Both vanish together at the
/// separability transition; `EtaBarLess` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    /// `η̄₋ - 1/2` (negative ⇔ entangled).
    EtaBarLess,
    /// `ζ₊` (negative ⇔ entangled).
    ZetaPlus,
}

/// A critical-temperature query: system, bath templates (the β of the
/// solved-for bath is ignored), which β is fixed and at what value, the
/// initial bracket, and tolerances.
#[derive(Debug, Clone, Copy)]
pub struct CriticalQuery<T> {
    pub system: SystemParams<T>,
    pub bath1: BathParams<T>,
    pub bath2: BathParams<T>,
    pub fixed_bath: FixedBath,
    pub fixed_beta: T,
    /// Initial bisection bracket `(β_lo, β_hi)` for the free bath.
    pub bracket: (T, T),
    /// Relative tolerance on the returned β.
    pub root_tol: T,
    pub quadrature: QuadratureConfig<T>,
    pub criterion: CriterionKind,
}

impl<T: Real> CriticalQuery<T> {
    /// Query with the default bracket `(1e-3, 10)`, root tolerance `1e-6`,
    /// default quadrature, and the `η̄₋ - 1/2` criterion.
    pub fn new(
        system: SystemParams<T>,
        bath1: BathParams<T>,
        bath2: BathParams<T>,
        fixed_bath: FixedBath,
        fixed_beta: T,
    ) -> Self {
        Self {
            system,
            bath1,
            bath2,
            fixed_bath,
            fixed_beta,
            bracket: (lit(1e-3), lit(10.0)),
            root_tol: lit(1e-6),
            quadrature: QuadratureConfig::default(),
            criterion: CriterionKind::EtaBarLess,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.fixed_beta > T::zero()) || !self.fixed_beta.is_finite() {
            return Err(Error::Domain(format!(
                "fixed inverse temperature must be positive and finite, got {}",
                self.fixed_beta
            )));
        }
        let (lo, hi) = self.bracket;
        if !(lo > T::zero() && lo < hi) || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "bracket must satisfy 0 < lo < hi < inf, got ({lo}, {hi})"
            )));
        }
        if !(self.root_tol > T::zero()) || !self.root_tol.is_finite() {
            return Err(Error::Domain(format!(
                "root tolerance must be positive and finite, got {}",
                self.root_tol
            )));
        }
        Ok(())
    }

    /// Quadrature tuned for root finding: the per-point relative tolerance
    /// is capped at `root_tol / 100` so criterion noise stays well below the
    /// bisection resolution, without ever loosening the configured value.
    fn quadrature_for_solve(&self) -> QuadratureConfig<T> {
        let mut q = self.quadrature;
        q.rel_tol = q.rel_tol.min(self.root_tol * lit(1e-2));
        q
    }
}

/// The separability criterion at one trial inverse temperature of the free
/// bath: negative inside the entangled phase, positive outside.
pub fn criterion_value<T: Real>(beta_free: T, query: &CriticalQuery<T>) -> Result<T> {
    criterion_value_with(beta_free, query, &query.quadrature)
}

fn criterion_value_with<T: Real>(
    beta_free: T,
    query: &CriticalQuery<T>,
    quadrature: &QuadratureConfig<T>,
) -> Result<T> {
    let (bath1, bath2) = match query.fixed_bath {
        FixedBath::Bath1 => (
            query.bath1.with_beta(query.fixed_beta)?,
            query.bath2.with_beta(beta_free)?,
        ),
        FixedBath::Bath2 => (
            query.bath1.with_beta(beta_free)?,
            query.bath2.with_beta(query.fixed_beta)?,
        ),
    };
    let problem = SteadyStateProblem::new(query.system, bath1, bath2, *quadrature)?;
    let cov = steady_covariance(&problem)?;
    match query.criterion {
        CriterionKind::EtaBarLess => {
            let (eta_bar_less, _) = symplectic_eigenvalues(&cov, true)?;
            Ok(eta_bar_less - half())
        }
        CriterionKind::ZetaPlus => Ok(simon_invariants(&cov).0),
    }
}

/// Maximum geometric expansion of each bracket end before giving up.
const MAX_EXPANSION: f64 = 1e3;

/// Find the critical inverse temperature of the free bath.
///
/// Expands the bracket geometrically (each end by up to 10³×) until the
/// criterion changes sign, then bisects to `root_tol` relative. With no sign
/// change in the fully expanded bracket, fails with [`Error::NoSignChange`]
/// carrying the verdict: `"always-entangled"` if the criterion is negative
/// throughout, `"always-separable"` if positive.
pub fn solve_critical<T: Real>(query: &CriticalQuery<T>) -> Result<T> {
    query.validate()?;
    let quad = query.quadrature_for_solve();
    let eval = |beta: T| criterion_value_with(beta, query, &quad);

    let (mut lo, mut hi) = query.bracket;
    let mut f_lo = eval(lo)?;
    let mut f_hi = eval(hi)?;

    let two = lit::<T>(2.0);
    let min_lo = lo / lit(MAX_EXPANSION);
    let max_hi = hi * lit(MAX_EXPANSION);
    // Alternate stretching the two ends; each step doubles one of them.
    while f_lo.signum() == f_hi.signum() {
        let can_lower = lo > min_lo;
        let can_raise = hi < max_hi;
        if !can_lower && !can_raise {
            let verdict = if f_lo < T::zero() {
                "always-entangled"
            } else {
                "always-separable"
            };
            return Err(Error::NoSignChange {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
                verdict,
            });
        }
        if can_lower {
            lo = (lo / two).max(min_lo);
            f_lo = eval(lo)?;
            if f_lo.signum() != f_hi.signum() {
                break;
            }
        }
        if can_raise {
            hi = (hi * two).min(max_hi);
            f_hi = eval(hi)?;
        }
    }

    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }

    // Bisection. 2000 iterations bounds even extreme tolerance requests.
    for _ in 0..2000 {
        let mid = (lo + hi) * half::<T>();
        if (hi - lo) <= query.root_tol * mid {
            return Ok(mid);
        }
        let f_mid = eval(mid)?;
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mid = (lo + hi) * half::<T>();
    Ok(mid)
}

/// Outcome of one sweep point of a critical line.
#[derive(Debug, Clone, PartialEq)]
pub enum PointStatus<T> {
    /// Crossing located at the contained critical β.
    Converged(T),
    /// Criterion negative over the whole expanded bracket.
    AlwaysEntangled,
    /// Criterion positive over the whole expanded bracket.
    AlwaysSeparable,
    /// The computation itself failed (message retained).
    Failed(String),
}

/// One point of a critical line: the fixed bath's β and what was found for
/// the free bath.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint<T> {
    pub fixed_beta: T,
    pub status: PointStatus<T>,
}

impl<T: Real> CriticalPoint<T> {
    /// The critical β, when one was found.
    pub fn critical_beta(&self) -> Option<T> {
        match self.status {
            PointStatus::Converged(beta) => Some(beta),
            _ => None,
        }
    }
}

/// A swept entanglement boundary: one [`CriticalPoint`] per fixed-β value,
/// in sweep order, plus the generating query template.
#[derive(Debug, Clone)]
pub struct CriticalLine<T> {
    pub points: Vec<CriticalPoint<T>>,
    pub query: CriticalQuery<T>,
}

/// Solve the boundary at every fixed β in `sweep` (strictly ascending).
///
/// Points are independent and solved in parallel; the output order is the
/// sweep order regardless of scheduling. Per-point failures — including the
/// no-crossing sentinels — are recorded in the point status, never fatal to
/// the sweep.
pub fn critical_line<T: Real>(query: &CriticalQuery<T>, sweep: &[T]) -> Result<CriticalLine<T>> {
    if sweep.is_empty() {
        return Err(Error::Domain("critical-line sweep must be nonempty".into()));
    }
    if sweep.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "critical-line sweep must be strictly ascending".into(),
        ));
    }
    query.validate()?;

    let points: Vec<CriticalPoint<T>> = sweep
        .par_iter()
        .map(|&fixed_beta| {
            let point_query = CriticalQuery {
                fixed_beta,
                ..*query
            };
            let status = match solve_critical(&point_query) {
                Ok(beta) => PointStatus::Converged(beta),
                Err(Error::NoSignChange { verdict, .. }) => {
                    if verdict == "always-entangled" {
                        PointStatus::AlwaysEntangled
                    } else {
                        PointStatus::AlwaysSeparable
                    }
                }
                Err(other) => PointStatus::Failed(other.to_string()),
            };
            CriticalPoint { fixed_beta, status }
        })
        .collect();

    Ok(CriticalLine {
        points,
        query: *query,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig_query() -> CriticalQuery<f64> {
        CriticalQuery::new(
            SystemParams::new(1.0, 5.0, 24.0).unwrap(),
            BathParams::new(0.005, 0.0, 1.0).unwrap(),
            BathParams::new(0.25, 0.0, 1.0).unwrap(),
            FixedBath::Bath2,
            1.5,
        )
    }

    #[test]
    fn criterion_signs_bracket_the_transition() {
        let q = fig_query();
        // Deep quantum regime: entangled, criterion negative.
        assert!(criterion_value(50.0, &q).unwrap() < 0.0);
        // Very hot bath 1: separable, criterion positive.
        assert!(criterion_value(1e-3, &q).unwrap() > 0.0);
    }

    #[test]
    fn reference_critical_temperature() {
        // Frozen from an independent pipeline (same physics, different
        // integrator and root finder).
        let beta = solve_critical(&fig_query()).unwrap();
        assert_relative_eq!(beta, 0.015204735857, max_relative = 1e-5);
        // Bracketing soundness at the returned root.
        let q = fig_query();
        let below = criterion_value(beta * (1.0 - 2e-6), &q).unwrap();
        let above = criterion_value(beta * (1.0 + 2e-6), &q).unwrap();
        assert!(below.signum() != above.signum());
    }

    #[test]
    fn zeta_criterion_agrees_with_eta_criterion() {
        let eta_root = solve_critical(&fig_query()).unwrap();
        let mut zq = fig_query();
        zq.criterion = CriterionKind::ZetaPlus;
        let zeta_root = solve_critical(&zq).unwrap();
        assert_relative_eq!(zeta_root, eta_root, max_relative = 1e-5);
    }

    #[test]
    fn temperature_dependent_damping_matches_explicit_rate() {
        // α = 1/2 at β = 4 halves γ̄: the criterion must equal the α = 0
        // path with γ = γ̄/2 exactly (same quadrature settings).
        let sys = SystemParams::new(1.0, 5.0, 24.0).unwrap();
        let tdep = CriticalQuery::new(
            sys,
            BathParams::new(0.2, 0.5, 1.0).unwrap(),
            BathParams::new(0.25, 0.0, 1.0).unwrap(),
            FixedBath::Bath2,
            1.5,
        );
        let explicit = CriticalQuery::new(
            sys,
            BathParams::new(0.1, 0.0, 1.0).unwrap(),
            BathParams::new(0.25, 0.0, 1.0).unwrap(),
            FixedBath::Bath2,
            1.5,
        );
        let beta_free = 4.0;
        let a = criterion_value(beta_free, &tdep).unwrap();
        let b = criterion_value(beta_free, &explicit).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hot_fixed_bath_is_always_separable() {
        // With bath 2 at T₂ = 20 and strong coupling, no β₁ in the expanded
        // bracket rescues entanglement.
        let mut q = fig_query();
        q.bath1 = BathParams::new(0.25, 0.0, 1.0).unwrap();
        q.fixed_beta = 0.05;
        q.bracket = (0.5, 2.0);
        match solve_critical(&q).unwrap_err() {
            Error::NoSignChange { verdict, .. } => assert_eq!(verdict, "always-separable"),
            other => panic!("expected NoSignChange, got {other:?}"),
        }
    }

    #[test]
    fn cold_bracket_far_above_transition_is_always_entangled() {
        // Bracket [100, 200] expands down to 0.1, still above the critical
        // β₁ ≈ 0.015: entangled throughout.
        let mut q = fig_query();
        q.bracket = (100.0, 200.0);
        match solve_critical(&q).unwrap_err() {
            Error::NoSignChange { verdict, .. } => assert_eq!(verdict, "always-entangled"),
            other => panic!("expected NoSignChange, got {other:?}"),
        }
    }

    #[test]
    fn line_sweep_collects_ordered_points() {
        let line = critical_line(&fig_query(), &[1.5, 3.0]).unwrap();
        assert_eq!(line.points.len(), 2);
        assert_eq!(line.points[0].fixed_beta, 1.5);
        assert_eq!(line.points[1].fixed_beta, 3.0);
        let first = line.points[0].critical_beta().unwrap();
        assert_relative_eq!(first, 0.015204735857, max_relative = 1e-5);
        // A colder fixed bath can only make entanglement easier: the free
        // bath may run hotter (smaller critical β).
        let second = line.points[1].critical_beta().unwrap();
        assert!(second <= first * 1.01);
    }

    #[test]
    fn sweep_validation() {
        let q = fig_query();
        assert!(critical_line(&q, &[]).is_err());
        assert!(critical_line(&q, &[2.0, 1.0]).is_err());
        assert!(critical_line(&q, &[1.0, 1.0]).is_err());
        let mut bad = q;
        bad.bracket = (1.0, 0.5);
        assert!(solve_critical(&bad).is_err());
        bad = q;
        bad.fixed_beta = -1.0;
        assert!(solve_critical(&bad).is_err());
    }
}
