use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |a[{row},{col}] - conj(a[{col},{row}])| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitianInput {
        row: usize,
        col: usize,
        deviation: f64,
        tolerance: f64,
    },
    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("eigensolver did not converge within {max_iterations} iterations")]
    ConvergenceFailure { max_iterations: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("spectral component {0} is empty")]
    EmptyComponent(&'static str),
    #[error("eigenvalue {eigenvalue} lies on the boundary {boundary} of a component interval")]
    AmbiguousMembership { eigenvalue: f64, boundary: f64 },
    #[error("eigenvalue {eigenvalue} of the perturbed matrix lies outside both enlarged components (excess {excess:e})")]
    EnclosureViolation { eigenvalue: f64, excess: f64 },
    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("argument outside domain: {0}")]
    DomainError(String),
    #[error("gap condition violated: |V+| + |V-| = {norm_sum} is not below d = {gap}")]
    GapConditionViolated { norm_sum: f64, gap: f64 },
    #[error("no sign change over bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root residual {residual:e} did not reach tolerance {tolerance:e}")]
    RootTolerance { residual: f64, tolerance: f64 },
    #[error("product constraint 1 - x = {target} unreachable with {n_max} steps of size <= 2/pi")]
    InfeasibleConstraint { target: f64, n_max: usize },
    #[error("invalid instance specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
