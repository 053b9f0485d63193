use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error(
        "negative-order operator on a field with nonzero mean (zero mode {magnitude:e}): \
         homogeneous fractional derivatives of negative order are undefined on constants"
    )]
    HomogeneityObstruction { magnitude: f64 },

    #[error("shell index {j} outside the filter range [{j_min}, {j_max}]")]
    ShellOutOfRange { j: i32, j_min: i32, j_max: i32 },

    #[error("grid hosts only {0} dyadic shells, at least 3 are required")]
    TooFewShells(usize),

    #[error("invalid fluid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vacuum detected at t = {time}: min density {min_rho:e} <= {threshold:e}")]
    Vacuum { time: f64, min_rho: f64, threshold: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("time step {dt:e} rejected: {reason}")]
    StepRejected { dt: f64, reason: String },

    #[error("Picard iteration diverged; contraction ratios {ratios:?}")]
    PicardDiverged { ratios: Vec<f64> },

    #[error("initial data too large for the fixed-point iteration: norm {norm:e} > {threshold:e}")]
    DataNotSmall { norm: f64, threshold: f64 },

    #[error("decay fit needs at least 8 points in the window, got {0}")]
    TooFewPoints(usize),

    #[error(
        "convolution estimate needs max(a, b) > 1 (a = {a}, b = {b}); \
         empirical constant grows by a factor {growth:.3} when t_max doubles"
    )]
    ConvolutionPrecondition { a: f64, b: f64, growth: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("no plot inputs in {dir}; expected one of: {}", expected.join(", "))]
    MissingInputs { dir: String, expected: Vec<String> },

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Process exit status for a successful run.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

impl Error {
    /// Exit status of the command-line tool when this error ends a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams(_) | Error::InvalidGrid(_) | Error::InvalidArgument(_) => {
                EXIT_CONFIG
            }
            Error::Vacuum { .. }
            | Error::PicardDiverged { .. }
            | Error::DataNotSmall { .. }
            | Error::ConvolutionPrecondition { .. }
            | Error::Assertion(_)
            | Error::NonFinite(_) => EXIT_ASSERTION,
            _ => EXIT_RUNTIME,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
