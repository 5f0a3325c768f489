use thiserror::Error;

use crate::geometry::GridFunction;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// A numeric argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArg(String),

    /// A grid would exceed the node budget.
    #[error("node budget exceeded: {required} nodes requested, cap is {cap}")]
    BudgetExceeded { required: usize, cap: usize },

    #[error("unknown gallery domain `{name}`; valid names: {valid}")]
    UnknownGallery { name: String, valid: String },

    /// The iterative minimizer did not reach the requested residual.
    /// Carries the best iterate found so callers can inspect it.
    #[error(
        "minimizer did not converge: residual {residual:.3e} after {iterations} iterations \
         (tolerance {tol:.3e})"
    )]
    NonConvergence {
        residual: f64,
        iterations: usize,
        tol: f64,
        best: Box<GridFunction>,
    },

    /// The sigma selection produced a threshold exponent p0 <= 1; the
    /// closed-form recipe cannot satisfy p0 in (1, p) for these inputs.
    #[error("calibration failed: p0 = {p_0:.6} <= 1 for gamma_0 = {gamma_0}, p = {p}")]
    CalibrationFailed { gamma_0: f64, p: f64, p_0: f64 },

    /// CLI / config-file problems (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidArg(_)
            | Error::UnknownGallery { .. }
            | Error::BudgetExceeded { .. } => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
