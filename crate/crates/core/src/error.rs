use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("source and target points coincide")]
    CoincidentPoints,

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile integral diverges at infinity (N = {n} <= 2m = {})", 2 * .m)]
    InfiniteProfile { n: usize, m: usize },

    #[error("finite-difference stencil of radius {stencil:e} too close to the singularity (|x-y| = {distance:e})")]
    StepUnderflow { stencil: f64, distance: f64 },

    #[error("point lies at the pole -e_1 of the conformal map")]
    PoleSingularity,

    #[error("quadrature budget of {max_subdivisions} subdivisions exhausted (estimated error {estimated_error:e})")]
    BudgetExceeded {
        max_subdivisions: usize,
        estimated_error: f64,
    },

    #[error("degenerate cap range: {0}")]
    DegenerateCap(String),

    #[error("manufactured solution lacks Laplacian power {0}")]
    MissingLaplacianPower(usize),

    #[error("truncated integrals decreased from {previous:e} to {current:e} at R = {radius}")]
    NonMonotoneSequence {
        radius: f64,
        previous: f64,
        current: f64,
    },

    #[error("radius schedule invalid: {0}")]
    ScheduleTooSmall(String),

    #[error("grid function has a negative value {value:e} at node {node}")]
    NegativeInput { node: usize, value: f64 },

    #[error("lattice node {node} lies within {distance:e} of the pole")]
    PoleProximity { node: usize, distance: f64 },

    #[error("lattice carries no rotation-orbit metadata")]
    IncompatibleLattice,

    #[error("solution escaped the blow-up cap at t = {t}")]
    BlowUp { t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
