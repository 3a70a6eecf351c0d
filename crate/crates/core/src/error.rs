use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has zero norm")]
    ZeroVector,

    #[error("invalid dimension {d}: need d >= {min}")]
    InvalidDimension { d: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("geodesic tangent is not orthogonal to its base (dot = {dot:e})")]
    NotOrthogonal { dot: f64 },

    #[error("target density is zero at the current state")]
    ZeroDensityAtState,

    #[error("target density returned {value}, expected a finite nonnegative number")]
    InvalidDensity { value: f64 },

    #[error("no acceptable point found on the geodesic after {proposals} proposals")]
    RejectionBudgetExceeded { proposals: u64 },

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid rotation angle {alpha}: must lie in (0, 2pi)")]
    InvalidAlpha { alpha: f64 },

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("sample sets have different sizes: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("sample size {n} exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("series is constant; autocorrelation is undefined")]
    ConstantSeries,

    #[error("series of length {n} is too short (need at least {min})")]
    TooShort { n: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coupled ratio disagrees with the reduced functional by {deviation:e}")]
    CouplingCheckFailed { deviation: f64 },
}

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(self),
        }
    }

    /// Short machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroVector => "ZeroVector",
            Error::InvalidDimension { .. } => "InvalidDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::ZeroDensityAtState => "ZeroDensityAtState",
            Error::InvalidDensity { .. } => "InvalidDensity",
            Error::RejectionBudgetExceeded { .. } => "RejectionBudgetExceeded",
            Error::AtIteration { source, .. } => source.kind(),
            Error::InvalidAlpha { .. } => "InvalidAlpha",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::ConstantSeries => "ConstantSeries",
            Error::TooShort { .. } => "TooShort",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::CouplingCheckFailed { .. } => "CouplingCheckFailed",
        }
    }
}
