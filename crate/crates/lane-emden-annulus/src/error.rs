//! Crate-wide error type.
//!
//! Input validation failures are kept separate from numerical failures so
//! that the CLI can map them to distinct exit codes (2 and 3 respectively).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The integrator produced a nonfinite state.
    #[error("integration blew up near r = {radius}")]
    BlowUp { radius: f64 },

    /// The integrator hit its step budget before reaching the outer radius.
    #[error("step limit exhausted near r = {radius}")]
    StepLimit { radius: f64 },

    /// The shooting scan found no slope bracket for the requested zero count.
    #[error("no shooting bracket for {zones} nodal zones in coefficient range [{lo:e}, {hi:e}]")]
    BracketFailure { zones: usize, lo: f64, hi: f64 },

    /// An iteration stalled above its residual tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Nodal zone boundaries left the annulus or lost their ordering.
    #[error("invalid zone placement: {0}")]
    InvalidPlacement(String),

    /// Two requested eigenvalues could not be separated by bisection.
    #[error("clustered spectrum near eigenvalue {index}")]
    ClusteredSpectrum { index: usize },

    /// A Rayleigh quotient was requested for a test function with zero norm.
    #[error("null test function")]
    NullTestFunction,

    /// An eigensolve returned data violating a structural guarantee.
    #[error("inconsistent spectrum: {0}")]
    InconsistentSpectrum(String),

    /// The deformation map folds over itself (det J <= 0 somewhere).
    #[error("deformation folds at r = {radius}, theta = {angle}")]
    Fold { radius: f64, angle: f64 },

    /// The second variation is numerically singular at the computed solution.
    #[error("degenerate linearization: pivot ratio {pivot_ratio:e}")]
    DegenerateLinearization { pivot_ratio: f64 },

    /// Wraps a failure inside a parameter sweep with the exponent that failed.
    #[error("at p = {p}: {source}")]
    AtExponent {
        p: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn at_exponent(p: f64, source: Error) -> Self {
        Error::AtExponent {
            p,
            source: Box::new(source),
        }
    }

    /// True for errors the CLI reports as usage errors (exit code 2).
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Config(_))
    }

    /// Process exit code: 2 for usage errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_usage() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
