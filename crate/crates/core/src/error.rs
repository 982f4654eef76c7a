use thiserror::Error;

/// Errors raised by the physics core and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A solver or grid configuration cannot be used.
    #[error("configuration error: {0}")]
    Config(String),

    /// The analytic model is not expected to hold for these parameters.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("visibility is undefined: all sampled intensities are zero")]
    UndefinedVisibility,

    #[error("predictability is undefined: both path amplitudes vanish")]
    UndefinedPredictability,

    /// The periodic solver domain is contaminated by field wrapping around.
    #[error("boundary amplitude {amplitude:e} exceeds {limit:e} at t = {time}")]
    BoundaryContamination {
        amplitude: f64,
        limit: f64,
        time: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
