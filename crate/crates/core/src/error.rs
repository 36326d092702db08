use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A map or state failed an internal consistency check (e.g. det != 1).
    #[error("consistency error: {0}")]
    Consistency(String),

    /// The requested evaluation needs more working precision than allowed.
    #[error("precision error: {0}")]
    Precision(String),

    /// A truncated distribution carries too much probability in its tail.
    #[error("truncation error: tail mass {tail:.3e} exceeds {limit:.1e}")]
    Truncation { tail: f64, limit: f64 },

    /// An adaptive numerical procedure did not reach its tolerance.
    #[error("numerical error: {what} reached {achieved:.3e}, wanted {wanted:.1e}")]
    Numerical {
        what: &'static str,
        achieved: f64,
        wanted: f64,
    },

    /// A schedule or profile document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}
