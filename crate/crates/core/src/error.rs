use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the operation's domain (e.g. |x| below the singularity guard).
    #[error("{op}: argument {value:e} is outside the domain")]
    Domain { op: &'static str, value: f64 },

    #[error("{op}: non-finite result for argument {value:e}")]
    Overflow { op: &'static str, value: f64 },

    #[error("degenerate orbit: zero derivative at index {index}")]
    DegenerateOrbit { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("density grid is not uniform at sample {index}")]
    NonUniformGrid { index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ordinates not strictly increasing at index {index}")]
    Monotonicity { index: usize },

    #[error("zero table contains no ordinates")]
    EmptyTable,

    #[error("need at least 2 zeros, found {found}")]
    TooFewZeros { found: usize },

    #[error("invalid input data: {0}")]
    InvalidData(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge for eigenvalue {index}")]
    Convergence { index: usize },

    #[error("degenerate spectrum: {tiny} of {total} gaps below 1e-12")]
    DegenerateSpectrum { tiny: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
