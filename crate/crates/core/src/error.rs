use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The scenario lies outside the regime where the PNS-versus-cloning
    /// comparison applies (the transmission window).
    #[error("scenario outside the analysed regime: {0}")]
    InvalidRegime(String),

    #[error("root finding failed: {0}")]
    NoBracket(String),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
