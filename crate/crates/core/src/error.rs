use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension N = {dim} must exceed 2m = {}", 2 * .order)]
    Dimension { dim: usize, order: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("root finder did not converge (max scaled residual {residual:.3e})")]
    RootFinder { residual: f64 },

    #[error(
        "skew part {asymmetry:.3e} exceeds 5% of operator norm {norm:.3e}; the grid is under-resolved near r = 0"
    )]
    Asymmetry { asymmetry: f64, norm: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("under-resolved: {nodes_per_eps:.3} nodes per eps, at least 8 required")]
    UnderResolved { nodes_per_eps: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    #[error("decay fit rejected: tail of the eigenfunction underflows (radius {radius} is too large)")]
    TailUnderflow { radius: f64 },

    #[error("witness search exhausted; a grid radius of at least {required_radius} is needed")]
    SearchExhausted { required_radius: f64 },

    #[error("degenerate oscillation fit: both amplitudes below 1e-10 (max {amplitude:.3e})")]
    DegenerateFit { amplitude: f64 },
}

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input values.
    Argument,
    /// Asymmetry, eigensolver or root-finder failure.
    Numerical,
    /// A scenario precondition does not hold.
    Precondition,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_) | Error::LengthMismatch { .. } => ErrorClass::Argument,
            Error::RootFinder { .. }
            | Error::Asymmetry { .. }
            | Error::Eigensolver(_)
            | Error::DegenerateFit { .. } => ErrorClass::Numerical,
            Error::Dimension { .. }
            | Error::UnderResolved { .. }
            | Error::Precondition(_)
            | Error::Infeasible(_)
            | Error::TailUnderflow { .. }
            | Error::SearchExhausted { .. } => ErrorClass::Precondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
