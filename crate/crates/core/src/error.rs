use thiserror::Error;

/// Errors raised by the Hermite toolkit.
///
/// Variants that concern a particular element of a sequence carry its index
/// so that callers (and the CLI) can point at the offending data.
#[derive(Debug, Error)]
pub enum HermiteError {
    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot normalize a near-zero vector (norm {norm:e})")]
    NearZeroVector { norm: f64 },

    #[error("sequence needs at least {min} elements, found {found}")]
    TooFewElements { min: usize, found: usize },

    #[error("coincident points at pair index {index}")]
    CoincidentPoints { index: usize },

    #[error("degenerate angles: alpha denominator {denominator:e} is too small")]
    DegenerateAngles { denominator: f64 },

    #[error("inadmissible pair at index {index}{}: {reason}", round.map(|r| format!(" (round {r})")).unwrap_or_default())]
    Inadmissible {
        index: usize,
        round: Option<usize>,
        reason: String,
    },

    #[error("Bezier derivative vanishes at weight {weight}")]
    VanishingTangent { weight: f64 },

    #[error("geodesic average of (nearly) antipodal vectors at index {index}")]
    AntipodalVectors { index: usize },

    #[error("parameter {value} outside [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate denominator in closed-form angle at ({theta0}, {theta1}, {theta})")]
    DegenerateDenominator {
        theta0: f64,
        theta1: f64,
        theta: f64,
    },

    #[error("quotient undefined at the origin")]
    UndefinedAtOrigin,

    #[error("input is not functional: {0}")]
    NonFunctionalInput(String),

    #[error("invalid search parameters: {0}")]
    ParameterError(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HermiteError {
    /// Re-targets a located error at sequence index `index`.
    pub(crate) fn at(self, index: usize) -> Self {
        match self {
            HermiteError::CoincidentPoints { .. } => HermiteError::CoincidentPoints { index },
            HermiteError::Inadmissible { round, reason, .. } => HermiteError::Inadmissible {
                index,
                round,
                reason,
            },
            HermiteError::AntipodalVectors { .. } => HermiteError::AntipodalVectors { index },
            other => other,
        }
    }

    pub(crate) fn in_round(self, round: usize) -> Self {
        match self {
            HermiteError::Inadmissible { index, reason, .. } => HermiteError::Inadmissible {
                index,
                round: Some(round),
                reason,
            },
            other => other,
        }
    }
}

pub type Result<T, E = HermiteError> = std::result::Result<T, E>;
