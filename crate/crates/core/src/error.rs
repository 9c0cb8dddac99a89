use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cell index {index} outside the explicit node range [{first}, {last}] in dimension {dim}")]
    IndexOutOfRange {
        dim: usize,
        index: i64,
        first: i64,
        last: i64,
    },

    #[error("sampling scheme does not match the one used to build the cell means")]
    SchemeMismatch,

    #[error("quadrature could not reach tolerance {tol:e} within {budget} evaluations (estimated error {estimate:e})")]
    QuadratureBudget {
        tol: f64,
        budget: usize,
        estimate: f64,
    },

    #[error("moment of order {beta} diverges for a kernel with decay exponent {decay}")]
    DivergentMoment { beta: f64, decay: f64 },

    #[error("Luxemburg bracket search failed after {0} steps")]
    BracketSearch(usize),

    #[error("sampled grids do not match")]
    GridMismatch,

    #[error("unknown kernel spec `{0}` (expected fejer, bspline:<k> or jackson:<k>[:<alpha>])")]
    UnknownKernel(String),

    #[error("image is not binary: found gray level {0}")]
    NotBinary(f64),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
