use thiserror::Error;

/// Errors raised by the physics and integration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantity lies outside the domain where the model is defined.
    #[error("{name} = {value:e} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// The pendulum angle left the open interval (-pi/2, pi/2).
    #[error("geometry violation: |phi| = {phi:e} rad must stay below pi/2")]
    Geometry { phi: f64 },
    /// Not enough zero crossings to measure a period.
    #[error("insufficient data: found {found} downward zero crossings, need at least 2")]
    InsufficientData { found: usize },
    /// The integrator configuration is inconsistent.
    #[error("invalid integrator config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
