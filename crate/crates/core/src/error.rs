use thiserror::Error;

/// Errors raised by the numerical kernels and the model layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature exhausted its refinement budget.
    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e}, tolerance {tolerance:e})")]
    NonConvergence {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// An integrand or objective produced NaN or an infinity.
    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root not bracketed: g({lo}) = {g_lo:e}, g({hi}) = {g_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("invalid parameter: {0}")]
    Param(String),

    /// The model carries no max-domain tag.
    #[error("model `{0}` has no max-domain of attraction")]
    NoDomain(String),

    #[error("domain mismatch: expected {expected} model, got `{model}`")]
    DomainMismatch { expected: &'static str, model: String },

    /// The survival function underflowed at `t`.
    #[error("survival function underflows at t = {t}")]
    TailUnderflow { t: f64 },

    /// A power integral failed to converge under panel refinement.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("cannot parse model spec `{0}`")]
    ModelSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
