use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// `HypothesisViolated` is special: it is a valid mathematical outcome (the
/// requested theorem simply does not apply to the given data) and carries the
/// point where the hypothesis fails, so callers can surface a witness instead
/// of a stack trace. Everything else is a genuine failure.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error at t = {t}: {msg}")]
    Domain { t: f64, msg: String },

    /// A parameter fails a structural precondition (dimension, tolerance
    /// range, pole order, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The adaptive integrator could not reach the requested accuracy.
    #[error("integrator failure at t = {t}: {msg}")]
    StepFailure { t: f64, msg: String },

    /// Quadrature did not converge within the recursion budget.
    #[error("quadrature failure on [{a}, {b}]: {msg}")]
    QuadratureFailure { a: f64, b: f64, msg: String },

    /// No eigenvalue bracket was found below the configured cap.
    #[error("no sign change found while doubling lambda up to {lambda_max}")]
    BracketNotFound { lambda_max: f64 },

    /// A positivity requirement failed during construction or validation.
    #[error("positivity violation at t = {t}: {msg}")]
    Positivity { t: f64, msg: String },

    /// The hypothesis of a comparison/bound theorem fails at `witness`.
    #[error("hypothesis violated at t = {witness}: {msg}")]
    HypothesisViolated { witness: f64, msg: String },

    /// A certified inequality came out the wrong way round. This must never
    /// happen for correct inputs; both eigenfunction traces are attached for
    /// post-mortem.
    #[error("theorem violation: {msg}")]
    TheoremViolation {
        msg: String,
        /// Downsampled (t, u) trace of the model eigenfunction.
        model_trace: Vec<(f64, f64)>,
        /// Downsampled (t, u) trace of the reference eigenfunction.
        reference_trace: Vec<(f64, f64)>,
    },

    /// An internal consistency check failed (e.g. a node appeared in a
    /// converged ground state). Indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed sampled-profile data.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
