use thiserror::Error;

/// Errors raised by the orbit, profile and capacity layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid phase-space geometry: {0}")]
    InvalidGeometry(String),

    #[error("ambiguous lift: coordinate {coordinate} jumps by {jump} between samples {index} and {next} (half period is {half_period})")]
    AmbiguousLift {
        coordinate: usize,
        index: usize,
        next: usize,
        jump: f64,
        half_period: f64,
    },

    #[error("loop winding {found:?} does not match the requested class {expected:?}")]
    WrongClass { expected: Vec<i64>, found: Vec<i64> },

    #[error("infeasible profile specification: {0}")]
    InfeasibleSpec(String),

    #[error("vector field is singular at the chart centre (f'(0) = {derivative})")]
    SingularPoint { derivative: f64 },

    #[error("analytic enumeration needs a radial Hamiltonian")]
    NotRadial,

    #[error("family at radial root {root} is not Morse-Bott")]
    NotMorseBott { root: f64 },

    #[error("implicit midpoint solve failed at step {step} (residual {residual:e})")]
    NewtonDivergence { step: usize, residual: f64 },

    #[error("invalid action interval: {0}")]
    InvalidInterval(String),

    #[error("hypothesis violated: {0}")]
    InvalidHypothesis(String),

    #[error("verification failed: {0}")]
    VerificationFailure(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
