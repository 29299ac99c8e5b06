//! Crate-wide error type.
//!
//! Diagnostic payloads are carried as `f64` regardless of the working scalar
//! type; they exist for error messages and triage, not for further numerics.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while assembling a steady state.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Parameters outside the validated domain (non-finite input, `Ω² ≤ |σ|`,
    /// negative damping, …). The message names the offending quantity.
    #[error("invalid parameters: {0}")]
    Domain(String),

    /// The response matrix has no inverse: `det D̃⁻¹(ω) = 0`. Only reachable
    /// at zero total damping with `ω` exactly on a normal mode.
    #[error("singular response matrix at omega = {omega} (undamped resonance)")]
    SingularResponse { omega: f64 },

    /// An integrand sample came back NaN or infinite.
    #[error("integrand returned a non-finite value at omega = {omega}")]
    NonFiniteSample { omega: f64 },

    /// Adaptive subdivision exhausted its budget before reaching tolerance.
    /// `value`/`error_estimate` are the best result so far (for a
    /// vector-valued integration, the worst component's).
    #[error(
        "quadrature tolerance not reached after {subdivisions} subdivisions \
         (best value {value:e}, error estimate {error_estimate:e})"
    )]
    ToleranceNotReached {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// A computed covariance matrix violates the Heisenberg bound
    /// `η_< ≥ 1/2` beyond numerical tolerance — an internal-consistency
    /// failure of the producing pipeline, not a property of the model.
    #[error("covariance violates the Heisenberg bound: eta_less = {eta_less}")]
    HeisenbergViolation { eta_less: f64 },

    /// A covariance matrix fed to the symplectic machinery is not a valid
    /// two-mode covariance (negative discriminant or negative squared
    /// symplectic eigenvalue beyond clamping tolerance).
    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    /// Bisection found no sign change inside the (expanded) bracket. The
    /// verdict records which side of the transition the whole bracket sits
    /// on: `"entangled everywhere"` or `"separable everywhere"`.
    #[error("no criterion sign change in [{lo}, {hi}]: {verdict}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        verdict: &'static str,
    },

    /// Two poles of the classical-limit integrand coincide to within the
    /// degeneracy tolerance; the simple-pole residue sum does not apply.
    /// Perturb the parameters (measure-zero configuration).
    #[error("degenerate response poles (separation {separation:e}); perturb the parameters")]
    DegeneratePoles { separation: f64 },

    /// A Monte Carlo trajectory left the basin of numerical stability.
    #[error("Monte Carlo trajectory diverged at step {step}")]
    McInstability { step: usize },
}
