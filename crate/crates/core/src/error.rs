//! Error type shared by all modules of the crate.

/// Errors produced by weight generation, assembly, solvers and studies.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A derivative weight table violates the sign pattern `w_0 > 0`,
    /// `w_j < 0` for `j >= 1` required by the energy arguments.
    #[error("weight table is not admissible (first sign violation at j = {first_violation}); pass an explicit acknowledgement to run anyway")]
    NotAdmissible { first_violation: usize },

    /// The diffusion coefficient was non-positive (or non-finite) at a
    /// quadrature point, so the elliptic part is not coercive.
    #[error("diffusivity D = {value} is not positive at x = {x}, t = {t}")]
    NonPositiveDiffusivity { x: f64, t: f64, value: f64 },

    /// The tridiagonal solver met a vanishing pivot.
    #[error("singular tridiagonal system: |pivot| = {pivot:e} at row {row}")]
    SingularSystem { row: usize, pivot: f64 },

    /// An index exceeded the stored range of a table or sequence.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A verification fixture violates its own hypothesis, so the check
    /// is meaningless (reports the first offending step).
    #[error("invalid fixture: hypothesis fails at n = {n} ({detail})")]
    InvalidFixture { n: usize, detail: String },

    /// A numeric iteration failed to converge within its budget.
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
