use thiserror::Error;

/// Errors raised by state construction, channels, phase-space evaluation and bounds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff too small: {0}")]
    CutoffTooSmall(String),

    #[error("total Hilbert dimension {total} exceeds the configured maximum {max}")]
    DimensionOverflow { total: usize, max: usize },

    #[error("invalid mode index {index} for a {modes}-mode state")]
    InvalidModeIndex { index: usize, modes: usize },

    #[error("transmittance {0} outside [0, 1]")]
    InvalidTransmittance(f64),

    #[error("noise variance {0} is negative or not finite")]
    InvalidNoiseVariance(f64),

    #[error("mode {mode} has {available} levels of headroom but noise {noise} needs {required}")]
    CutoffHeadroomInsufficient {
        mode: usize,
        noise: f64,
        available: usize,
        required: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("|mu| = {modulus} is outside the reliable range {limit} for this cutoff")]
    ArgumentOutOfReliableRange { modulus: f64, limit: f64 },

    #[error("phase-space grid too small: {0}")]
    GridTooSmall(String),

    #[error("P-function takes negative value {value} at grid index {index}")]
    NegativePFunction { index: usize, value: f64 },

    #[error("cutoff mismatch: {0:?} vs {1:?}")]
    CutoffMismatch(Vec<usize>, Vec<usize>),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("degenerate denominator {0}")]
    DegenerateDenominator(f64),

    #[error("operator is not a POVM element: {0}")]
    InvalidPovmElement(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error: {0}")]
    ConfigParse(String),

    #[error("scenario {scenario} at {point}: {source}")]
    Scenario { scenario: String, point: String, source: Box<Error> },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
