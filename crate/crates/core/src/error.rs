use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("group element violates its coordinate invariant: {0}")]
    InvariantViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("character e^(2 pi i tr(M kappa)) is not a character of the lattice subgroup: {0}")]
    GateFailure(String),
    #[error("lattice-sum tail bound {bound:.3e} exceeds {eps:.3e} at radius cap {r_max}")]
    TailBudgetExceeded { bound: f64, eps: f64, r_max: i64 },
    #[error("quadrature with {points} points per axis cannot resolve frequency {frequency}")]
    QuadratureTooCoarse { points: usize, frequency: i64 },
    #[error("numerically singular Gaussian form (condition number {0:.3e})")]
    NumericallySingular(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
