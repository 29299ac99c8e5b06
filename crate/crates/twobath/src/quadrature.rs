//! Adaptive Gauss–Kronrod integration on a truncated half-line.
//!
//! The covariance integrands are smooth on `[0, Λ]` but sharply peaked at the
//! two damped normal modes, with Lorentzian halfwidths that can be four or
//! more orders of magnitude narrower than the cutoff. A plain adaptive scheme
//! started from a single panel can step straight over such a peak and report
//! spurious convergence, so the integrator accepts an explicit list of
//! [`Peak`]s and places mandatory panel boundaries a configurable number of
//! halfwidths to each side of every peak before any subdivision happens.
//!
//! Each panel is estimated with the 21-point Kronrod extension of 10-point
//! Gauss quadrature; the Gauss/Kronrod difference drives the error estimate
//! through the standard QUADPACK rescaling. The engine integrates a small
//! fixed-size vector of integrands in lockstep (const generic `N`) so all
//! seven covariance components share one set of function evaluations, and it
//! subdivides the panel that is worst relative to the per-component
//! tolerances until every component converges.
//!
//! Determinism: panel selection breaks ties toward the lowest index, and the
//! final totals are accumulated in ascending order of the panel's left
//! endpoint with Neumaier compensation, so results are bit-identical across
//! runs regardless of subdivision history.

use crate::error::{Error, Result};
use crate::scalar::{half, lit, Real};

/// A spectral peak the integrator must not step over: Lorentzian-like
/// structure centered at `center` with halfwidth `halfwidth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub center: T,
    pub halfwidth: T,
}

/// Tolerances and limits for the half-line integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    /// Upper integration limit Λ of the truncated half-line `[0, Λ]`.
    pub cutoff: T,
    /// Relative tolerance on each integral component.
    pub rel_tol: T,
    /// Absolute tolerance on each integral component.
    pub abs_tol: T,
    /// Maximum number of panel subdivisions before giving up.
    pub max_subdivisions: usize,
    /// Mandatory breakpoints are placed `peak_padding` halfwidths on either
    /// side of each declared peak.
    pub peak_padding: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            cutoff: lit(5000.0),
            rel_tol: lit(1e-9),
            abs_tol: lit(1e-14),
            max_subdivisions: 10_000,
            peak_padding: lit(10.0),
        }
    }
}

/// Converged integral with its accumulated error estimate and the total
/// number of integrand evaluations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
}

/// Integrate a scalar function over `[0, cutoff]` with mandatory breakpoints
/// around the declared peaks.
pub fn integrate_halfline<T, F>(
    f: F,
    peaks: &[Peak<T>],
    config: &QuadratureConfig<T>,
) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let r = integrate_vector::<T, 1, _>(|w| Ok([f(w)]), peaks, config)?;
    Ok(QuadratureResult {
        value: r.values[0],
        error_estimate: r.error_estimates[0],
        evaluations: r.evaluations,
    })
}

/// Result of a lockstep vector integration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct VectorQuadrature<T, const N: usize> {
    pub values: [T; N],
    pub error_estimates: [T; N],
    pub evaluations: usize,
}

/// Integrate `N` components sharing one set of sample points over
/// `[0, cutoff]`. The integrand may fail (e.g. a singular response matrix);
/// non-finite sample components are rejected with [`Error::NonFiniteSample`].
///
/// Convergence requires, for every component `k`,
/// `total_error_k ≤ max(rel_tol · |total_k|, abs_tol, 2 · floor_k)` where
/// `floor_k` is the summed QUADPACK roundoff floor `50 ε Σ|f|`: tolerances
/// below what the error estimator can certify in finite precision are
/// treated as met once the estimate is within a factor two of that floor,
/// instead of subdividing forever.
pub(crate) fn integrate_vector<T, const N: usize, F>(
    f: F,
    peaks: &[Peak<T>],
    config: &QuadratureConfig<T>,
) -> Result<VectorQuadrature<T, N>>
where
    T: Real,
    F: Fn(T) -> Result<[T; N]>,
{
    validate_config(config)?;
    let rule = Gk21::<T>::new();
    let points = breakpoints(peaks, config.cutoff, config.peak_padding)?;

    let mut panels: Vec<Panel<T, N>> = Vec::with_capacity(points.len().max(2) * 2);
    for pair in points.windows(2) {
        panels.push(eval_panel(&f, &rule, pair[0], pair[1])?);
    }
    let mut panel_evals = panels.len();

    let mut totals = [T::zero(); N];
    let mut total_errors = [T::zero(); N];
    let mut total_floors = [T::zero(); N];
    for p in &panels {
        for k in 0..N {
            totals[k] += p.values[k];
            total_errors[k] += p.errors[k];
            total_floors[k] += p.floors[k];
        }
    }

    let two = lit::<T>(2.0);
    let mut splits = 0usize;
    loop {
        let mut tol = [T::zero(); N];
        for k in 0..N {
            tol[k] = (config.rel_tol * totals[k].abs())
                .max(config.abs_tol)
                .max(two * total_floors[k]);
        }
        let converged = (0..N).all(|k| total_errors[k] <= tol[k]);
        if converged {
            break;
        }

        let give_up = |totals: &[T; N], total_errors: &[T; N], tol: &[T; N]| {
            let mut worst_k = 0usize;
            let mut worst_ratio = T::neg_infinity();
            for k in 0..N {
                let ratio = if tol[k] > T::zero() {
                    total_errors[k] / tol[k]
                } else {
                    T::infinity()
                };
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_k = k;
                }
            }
            Error::ToleranceNotReached {
                value: totals[worst_k].to_f64().unwrap_or(f64::NAN),
                error_estimate: total_errors[worst_k].to_f64().unwrap_or(f64::NAN),
                subdivisions: splits,
            }
        };

        if splits >= config.max_subdivisions {
            return Err(give_up(&totals, &total_errors, &tol));
        }

        // Subdivide the panel that is worst relative to the tolerances.
        let mut worst = 0usize;
        let mut worst_badness = T::neg_infinity();
        for (i, p) in panels.iter().enumerate() {
            let mut badness = T::zero();
            for k in 0..N {
                let b = if tol[k] > T::zero() {
                    p.errors[k] / tol[k]
                } else if p.errors[k] > T::zero() {
                    T::infinity()
                } else {
                    T::zero()
                };
                badness = badness.max(b);
            }
            if badness > worst_badness {
                worst_badness = badness;
                worst = i;
            }
        }

        let (a, b) = (panels[worst].a, panels[worst].b);
        let mid = (a + b) * half();
        if !(mid > a && mid < b) {
            // Panel width at the resolution limit of the floating point type.
            return Err(give_up(&totals, &total_errors, &tol));
        }
        let left = eval_panel(&f, &rule, a, mid)?;
        let right = eval_panel(&f, &rule, mid, b)?;
        panel_evals += 2;
        let parent = panels[worst];
        for k in 0..N {
            totals[k] += left.values[k] + right.values[k] - parent.values[k];
            total_errors[k] += left.errors[k] + right.errors[k] - parent.errors[k];
            total_floors[k] += left.floors[k] + right.floors[k] - parent.floors[k];
        }
        panels[worst] = left;
        panels.push(right);
        splits += 1;
    }

    // Deterministic final assembly: ascending left endpoint, compensated sum.
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).expect("panel endpoints are finite"));
    let mut values = [T::zero(); N];
    let mut error_estimates = [T::zero(); N];
    for k in 0..N {
        values[k] = neumaier_sum(panels.iter().map(|p| p.values[k]));
        error_estimates[k] = neumaier_sum(panels.iter().map(|p| p.errors[k]));
    }

    Ok(VectorQuadrature {
        values,
        error_estimates,
        evaluations: panel_evals * 21,
    })
}

fn validate_config<T: Real>(config: &QuadratureConfig<T>) -> Result<()> {
    if !(config.cutoff > T::zero()) || !config.cutoff.is_finite() {
        return Err(Error::Domain(format!(
            "integration cutoff must be positive and finite, got {}",
            config.cutoff
        )));
    }
    if !(config.rel_tol >= T::zero()) || !(config.abs_tol >= T::zero()) {
        return Err(Error::Domain(
            "quadrature tolerances must be nonnegative".into(),
        ));
    }
    if config.rel_tol == T::zero() && config.abs_tol == T::zero() {
        return Err(Error::Domain(
            "at least one quadrature tolerance must be positive".into(),
        ));
    }
    if config.max_subdivisions == 0 {
        return Err(Error::Domain(
            "max_subdivisions must be at least 1".into(),
        ));
    }
    if !(config.peak_padding >= T::zero()) || !config.peak_padding.is_finite() {
        return Err(Error::Domain(format!(
            "peak_padding must be nonnegative and finite, got {}",
            config.peak_padding
        )));
    }
    Ok(())
}

/// Mandatory initial panel boundaries: 0, the cutoff, and the clipped edges
/// `center ± peak_padding · halfwidth` of every peak whose padded interval
/// overlaps `(0, cutoff)`. Peaks entirely outside the window are ignored.
fn breakpoints<T: Real>(peaks: &[Peak<T>], cutoff: T, padding: T) -> Result<Vec<T>> {
    let mut pts = vec![T::zero(), cutoff];
    for p in peaks {
        if !p.center.is_finite() || !p.halfwidth.is_finite() || p.halfwidth < T::zero() {
            return Err(Error::Domain(format!(
                "peak must have finite center and nonnegative halfwidth, got center {} halfwidth {}",
                p.center, p.halfwidth
            )));
        }
        let lo = p.center - padding * p.halfwidth;
        let hi = p.center + padding * p.halfwidth;
        if hi <= T::zero() || lo >= cutoff {
            continue;
        }
        pts.push(lo.max(T::zero()));
        pts.push(hi.min(cutoff));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints are finite"));
    pts.dedup();
    Ok(pts)
}

#[derive(Debug, Clone, Copy)]
struct Panel<T, const N: usize> {
    a: T,
    b: T,
    values: [T; N],
    errors: [T; N],
    floors: [T; N],
}

fn eval_panel<T, const N: usize, F>(f: &F, rule: &Gk21<T>, a: T, b: T) -> Result<Panel<T, N>>
where
    T: Real,
    F: Fn(T) -> Result<[T; N]>,
{
    let center = (a + b) * half::<T>();
    let hl = (b - a) * half::<T>();
    let fc = sample(f, center)?;

    let mut resk = [T::zero(); N];
    let mut resg = [T::zero(); N];
    let mut resabs = [T::zero(); N];
    for k in 0..N {
        resk[k] = rule.wgk[10] * fc[k];
        resabs[k] = rule.wgk[10] * fc[k].abs();
    }

    let mut fv1 = [[T::zero(); N]; 10];
    let mut fv2 = [[T::zero(); N]; 10];
    for j in 0..10 {
        let absc = hl * rule.xgk[j];
        let f1 = sample(f, center - absc)?;
        let f2 = sample(f, center + absc)?;
        for k in 0..N {
            resk[k] += rule.wgk[j] * (f1[k] + f2[k]);
            resabs[k] += rule.wgk[j] * (f1[k].abs() + f2[k].abs());
        }
        if j % 2 == 1 {
            // Odd Kronrod indices are the embedded 10-point Gauss nodes.
            let wg = rule.wg[(j - 1) / 2];
            for k in 0..N {
                resg[k] += wg * (f1[k] + f2[k]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }

    let dhl = hl.abs();
    let mut values = [T::zero(); N];
    let mut errors = [T::zero(); N];
    let mut floors = [T::zero(); N];
    let fifty_eps = lit::<T>(50.0) * T::epsilon();
    for k in 0..N {
        let reskh = resk[k] * half::<T>();
        let mut resasc = rule.wgk[10] * (fc[k] - reskh).abs();
        for j in 0..10 {
            resasc += rule.wgk[j] * ((fv1[j][k] - reskh).abs() + (fv2[j][k] - reskh).abs());
        }
        let scaled_abs = resabs[k] * dhl;
        values[k] = resk[k] * hl;
        errors[k] = rescale_error((resk[k] - resg[k]) * hl, scaled_abs, resasc * dhl);
        floors[k] = if scaled_abs > T::min_positive_value() / fifty_eps {
            fifty_eps * scaled_abs
        } else {
            T::zero()
        };
    }

    Ok(Panel {
        a,
        b,
        values,
        errors,
        floors,
    })
}

fn sample<T, const N: usize, F>(f: &F, omega: T) -> Result<[T; N]>
where
    T: Real,
    F: Fn(T) -> Result<[T; N]>,
{
    let v = f(omega)?;
    for x in &v {
        if !x.is_finite() {
            return Err(Error::NonFiniteSample {
                omega: omega.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(v)
}

/// QUADPACK error rescaling: sharpen the raw Gauss/Kronrod difference
/// against the scale of the integrand's variation (`resasc`) and clamp from
/// below by the roundoff floor `50 ε · resabs`.
fn rescale_error<T: Real>(err: T, resabs: T, resasc: T) -> T {
    let mut err = err.abs();
    if resasc != T::zero() && err != T::zero() {
        let scale = (lit::<T>(200.0) * err / resasc).powf(lit(1.5));
        err = if scale < T::one() { resasc * scale } else { resasc };
    }
    let fifty_eps = lit::<T>(50.0) * T::epsilon();
    if resabs > T::min_positive_value() / fifty_eps {
        let min_err = fifty_eps * resabs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

fn neumaier_sum<T: Real>(items: impl Iterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in items {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// 21-point Kronrod / 10-point Gauss pair on `[-1, 1]`.
///
/// `xgk` holds the nonnegative Kronrod abscissae in descending order plus the
/// center; odd indices are the embedded Gauss abscissae, whose weights are
/// `wg`. All values are exact to f64 precision.
struct Gk21<T> {
    xgk: [T; 11],
    wgk: [T; 11],
    wg: [T; 5],
}

impl<T: Real> Gk21<T> {
    fn new() -> Self {
        const XGK: [f64; 11] = [
            0.995_657_163_025_808_1,
            0.973_906_528_517_171_7,
            0.930_157_491_355_708_2,
            0.865_063_366_688_984_5,
            0.780_817_726_586_416_9,
            0.679_409_568_299_024_4,
            0.562_757_134_668_604_7,
            0.433_395_394_129_247_2,
            0.294_392_862_701_460_2,
            0.148_874_338_981_631_2,
            0.0,
        ];
        const WGK: [f64; 11] = [
            0.011_694_638_867_371_874,
            0.032_558_162_307_964_725,
            0.054_755_896_574_351_995,
            0.075_039_674_810_919_96,
            0.093_125_454_583_697_6,
            0.109_387_158_802_297_64,
            0.123_491_976_262_065_84,
            0.134_709_217_311_473_34,
            0.142_775_938_577_060_1,
            0.147_739_104_901_338_49,
            0.149_445_554_002_916_9,
        ];
        const WG: [f64; 5] = [
            0.066_671_344_308_688_14,
            0.149_451_349_150_580_6,
            0.219_086_362_515_982_04,
            0.269_266_719_309_996_35,
            0.295_524_224_714_752_87,
        ];
        let mut xgk = [T::zero(); 11];
        let mut wgk = [T::zero(); 11];
        let mut wg = [T::zero(); 5];
        for (dst, src) in xgk.iter_mut().zip(XGK) {
            *dst = lit(src);
        }
        for (dst, src) in wgk.iter_mut().zip(WGK) {
            *dst = lit(src);
        }
        for (dst, src) in wg.iter_mut().zip(WG) {
            *dst = lit(src);
        }
        Self { xgk, wgk, wg }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(cutoff: f64) -> QuadratureConfig<f64> {
        QuadratureConfig {
            cutoff,
            ..QuadratureConfig::default()
        }
    }

    #[test]
    fn kronrod_weights_integrate_constants() {
        // Weights on [-1, 1] must sum to 2; Gauss weights likewise.
        let rule = Gk21::<f64>::new();
        let kron: f64 = rule.wgk[10] + 2.0 * rule.wgk[..10].iter().sum::<f64>();
        let gauss: f64 = 2.0 * rule.wg.iter().sum::<f64>();
        assert_relative_eq!(kron, 2.0, max_relative = 1e-14);
        assert_relative_eq!(gauss, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_halfline(|w: f64| (-w).exp(), &[], &cfg(50.0)).unwrap();
        assert_relative_eq!(r.value, 1.0 - (-50.0f64).exp(), max_relative = 1e-12);
        assert!(r.error_estimate < 1e-9);
        assert_eq!(r.evaluations % 21, 0);
    }

    #[test]
    fn low_degree_polynomial_is_exact_on_one_panel() {
        let r = integrate_halfline(|w: f64| w * w * w, &[], &cfg(2.0)).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-15);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn narrow_lorentzian_with_declared_peak() {
        let (c, w) = (3.0f64, 1e-6f64);
        let exact = ((10.0 - c) / w).atan() / std::f64::consts::PI
            + (c / w).atan() / std::f64::consts::PI;
        let r = integrate_halfline(
            |x: f64| w / std::f64::consts::PI / ((x - c) * (x - c) + w * w),
            &[Peak {
                center: c,
                halfwidth: w,
            }],
            &cfg(10.0),
        )
        .unwrap();
        assert_relative_eq!(r.value, exact, max_relative = 1e-8);
    }

    #[test]
    fn peak_outside_window_changes_nothing() {
        let f = |w: f64| 1.0 / (1.0 + w * w);
        let plain = integrate_halfline(f, &[], &cfg(20.0)).unwrap();
        let ignored = integrate_halfline(
            f,
            &[Peak {
                center: -5.0,
                halfwidth: 0.1,
            }],
            &cfg(20.0),
        )
        .unwrap();
        assert_eq!(plain.value.to_bits(), ignored.value.to_bits());
        assert_eq!(plain.evaluations, ignored.evaluations);
    }

    #[test]
    fn peak_straddling_origin_is_clipped() {
        let f = |w: f64| (-w).exp();
        let r = integrate_halfline(
            f,
            &[Peak {
                center: 0.5,
                halfwidth: 0.2,
            }],
            &cfg(30.0),
        )
        .unwrap();
        // Padded interval [-1.5, 2.5] clips to [0, 2.5].
        assert_relative_eq!(r.value, 1.0 - (-30.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn vector_components_share_samples_and_converge_independently() {
        // Component scales differ by 1e6; the relative tolerance must apply
        // per component, not to the largest.
        let r = integrate_vector::<f64, 2, _>(
            |w| Ok([(-w).exp(), 1e-6 * (-2.0 * w).exp()]),
            &[],
            &cfg(40.0),
        )
        .unwrap();
        assert_relative_eq!(r.values[0], 1.0, max_relative = 1e-10);
        assert_relative_eq!(r.values[1], 5e-7, max_relative = 1e-8);
    }

    #[test]
    fn non_finite_sample_is_reported_with_location() {
        // Center of [0, 2] is exactly 1, where the integrand blows up.
        let err = integrate_halfline(|w: f64| 1.0 / (w - 1.0), &[], &cfg(2.0)).unwrap_err();
        match err {
            Error::NonFiniteSample { omega } => assert_eq!(omega, 1.0),
            other => panic!("expected NonFiniteSample, got {other:?}"),
        }
    }

    #[test]
    fn subdivision_budget_exhaustion_is_an_error() {
        let jump = |w: f64| if w < std::f64::consts::SQRT_2 { 0.0 } else { 1.0 };
        let tight = QuadratureConfig {
            cutoff: 3.0,
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 3,
            peak_padding: 10.0,
        };
        match integrate_halfline(jump, &[], &tight).unwrap_err() {
            Error::ToleranceNotReached { subdivisions, .. } => assert_eq!(subdivisions, 3),
            other => panic!("expected ToleranceNotReached, got {other:?}"),
        }
    }

    #[test]
    fn oscillatory_integrand_converges() {
        // int_0^20 cos(w) dw = sin(20)
        let r = integrate_halfline(|w: f64| w.cos(), &[], &cfg(20.0)).unwrap();
        assert_relative_eq!(r.value, 20.0f64.sin(), max_relative = 1e-10);
    }

    #[test]
    fn config_validation_rejects_degenerate_requests() {
        let f = |w: f64| w;
        let mut c = cfg(0.0);
        assert!(integrate_halfline(f, &[], &c).is_err());
        c = cfg(1.0);
        c.rel_tol = 0.0;
        c.abs_tol = 0.0;
        assert!(integrate_halfline(f, &[], &c).is_err());
        c = cfg(1.0);
        c.max_subdivisions = 0;
        assert!(integrate_halfline(f, &[], &c).is_err());
        c = cfg(1.0);
        c.peak_padding = -1.0;
        assert!(integrate_halfline(f, &[], &c).is_err());
        assert!(integrate_halfline(
            f,
            &[Peak {
                center: f64::NAN,
                halfwidth: 1.0
            }],
            &cfg(1.0)
        )
        .is_err());
    }

    #[test]
    fn zero_true_value_converges_at_estimator_floor() {
        // Odd function around the interval midpoint: the exact integral is 0,
        // far below any reachable absolute tolerance relative to |f|.
        let r = integrate_halfline(|w: f64| (w - 5.0).sin(), &[], &cfg(10.0)).unwrap();
        assert!(r.value.abs() < 1e-12);
        assert!(r.error_estimate > 0.0);
    }
}
