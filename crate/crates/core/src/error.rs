use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("stencil needs {needed} ghost layer(s), field has {have}")]
    InsufficientGhost { needed: usize, have: usize },

    #[error("operator requires dx == dy, got dx = {dx}, dy = {dy}")]
    AnisotropicGrid { dx: f64, dy: f64 },

    #[error("boundary is not resolved near node ({i}, {j}): more than one sign change along a cell edge")]
    UnresolvedBoundary { i: usize, j: usize },

    #[error("domain has no interior nodes at this resolution")]
    DegenerateDomain,

    #[error("level set does not change sign between the ghost node and its interior neighbor")]
    NoSignChange,

    #[error("no positive optimal time step: alpha = {alpha}, beta = {beta} have opposite signs")]
    NoPositiveRoot { alpha: f64, beta: f64 },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    Stability { dt: f64, limit: f64 },

    #[error("missing derivative `{0}` required by the scheme")]
    MissingDerivative(String),

    #[error("grid ratio mismatch: optimal 2D advection needs dy/dx = {expected}, got {actual}")]
    RatioMismatch { expected: f64, actual: f64 },

    #[error("edge ghost at ({i}, {j}) has too few interior nodes along its fill axis")]
    NotEnoughInteriorPoints { i: usize, j: usize },

    #[error("corner ghost at ({i}, {j}) has no admissible extrapolation stencil")]
    CornerStencil { i: usize, j: usize },

    #[error("corner ghost at ({i}, {j}) read an edge ghost that was not filled")]
    UnfilledGhost { i: usize, j: usize },

    #[error("zero pivot in row {0}")]
    ZeroPivot(usize),

    #[error("conjugate gradient did not converge: {iterations} iterations, residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("solution diverged at step {step}")]
    Diverged { step: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
