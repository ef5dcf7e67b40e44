use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates one of the model's inequalities; the message
    /// names the inequality.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the zero polynomial has no stability classification")]
    ZeroPolynomial,

    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },

    #[error("denominator must be monic (leading coefficient 1), got {0}")]
    NotMonic(f64),

    #[error("controller numerator leading coefficient b0 must be nonzero")]
    ZeroLeadingNumerator,

    #[error("coefficient index {index} out of range (allowed {lo}..={hi})")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("closed loop is not stable at the nominal plant coefficients")]
    NominalUnstable,

    #[error("slack must be positive and finite, got {0}")]
    NonPositiveSlack(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (error estimate {error_estimate:e}, tolerance {tolerance:e})"
    )]
    QuadratureNonConvergence {
        evaluations: usize,
        error_estimate: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::QuadratureNonConvergence { .. })
    }
}
