use thiserror::Error;

/// Errors produced by the set algebra, transforms and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval endpoints must be finite, got ({a}, {b})")]
    NonFinite { a: f64, b: f64 },

    #[error("interval ({a}, {b}) is empty: left endpoint must be strictly below the right")]
    EmptyInterval { a: f64, b: f64 },

    #[error("intervals are not sorted with positive gaps at index {index}")]
    NotCanonical { index: usize },

    #[error("a nonempty set is required")]
    EmptySet,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("principal value diverges at x = {x}")]
    Singular { x: f64 },

    #[error(
        "quadrature did not converge within {budget} subdivisions (error estimate {estimate:e})"
    )]
    QuadratureBudget { budget: usize, estimate: f64 },

    #[error("root bracket failed on ({lo}, {hi})")]
    Bracket { lo: f64, hi: f64 },

    #[error("floating-point resolution exhausted: {context}")]
    Resolution { context: String },

    #[error("{what} budget exhausted (best margin {best_margin:e})")]
    Budget {
        what: &'static str,
        best_margin: f64,
    },

    #[error("blocks overlap: [{a0}, {a1}] and [{b0}, {b1}]")]
    OverlappingBlocks { a0: f64, a1: f64, b0: f64, b1: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
