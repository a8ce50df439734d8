use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A generator of the wrong class was passed to a map that only accepts
    /// unitary (or only dissipative) generators.
    #[error("{operation} requires a {expected} generator, got {got}")]
    WrongGeneratorKind {
        operation: &'static str,
        expected: &'static str,
        got: &'static str,
    },

    /// The closed-form eigensystem and coefficient flow exist only while the
    /// squared frequency is positive.
    #[error("coupling matrix is {regime} (omega^2 = {omega_squared:.6e}); this operation requires the oscillatory regime")]
    NotOscillatory {
        regime: &'static str,
        omega_squared: f64,
    },

    /// Closed-form preset expressions require gamma < 2*omega0.
    #[error("{kind} closed forms require gamma < 2*omega0 (gamma = {gamma}, omega0 = {omega0})")]
    Overdamped {
        kind: &'static str,
        gamma: f64,
        omega0: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Generalized uncertainty below the physical floor of 1/4.
    #[error("state is unphysical: generalized uncertainty {delta:.6e} < 1/4 - {tol:.1e}")]
    Unphysical { delta: f64, tol: f64 },

    /// The damping exponent carried by a coefficient set disagrees with the
    /// relaxation constant and time it is being applied with.
    #[error("damping exponent h = {h:.6e} inconsistent with -gamma*t = {expected:.6e}")]
    InconsistentDamping { h: f64, expected: f64 },

    #[error("singular matrix in linear solve (zero pivot at row {row})")]
    SingularMatrix { row: usize },

    #[error("step control failed at t = {t:.6e}: step size {step:.3e} fell below the minimum")]
    StepControlFailed { t: f64, step: f64 },

    #[error("quadrature did not reach tolerance {tol:.1e} (error estimate {estimate:.3e})")]
    QuadratureTolerance { estimate: f64, tol: f64 },

    /// Occupation has leaked into the top of the truncated number basis.
    #[error("truncation too small: tail occupation {tail:.3e} exceeds {tol:.1e} at dim = {dim}")]
    TruncationLeak { tail: f64, tol: f64, dim: usize },

    #[error("trace deviates from expected by {deviation:.3e} (tolerance {tol:.1e})")]
    TraceLoss { deviation: f64, tol: f64 },

    #[error("evolved matrix lost hermiticity: deviation {deviation:.3e} (tolerance {tol:.1e})")]
    HermiticityLoss { deviation: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
