use thiserror::Error;

/// Errors raised by the algebra, module, triple and ball layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian (defect {defect:e} exceeds {limit:e})")]
    NotHermitian { defect: f64, limit: f64 },

    #[error("not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },

    #[error("singular (smallest/largest singular value ratio {ratio:e})")]
    Singular { ratio: f64 },

    #[error("operator has no A-valued adjoint (residual {residual:e})")]
    NotAdjointable { residual: f64 },

    #[error("operator is not an A-module map (residual {residual:e})")]
    NotALinear { residual: f64 },

    #[error(
        "spectral and sampled positivity tests disagree (spectral {spectral}, sampled {sampled})"
    )]
    InternalInconsistency { spectral: bool, sampled: bool },

    #[error("point lies outside the open unit ball (norm {norm})")]
    OutsideBall { norm: f64 },

    #[error("point too close to the unit sphere (norm {norm}, allowed at most {limit})")]
    NearBoundary { norm: f64, limit: f64 },

    #[error("operator is not an isometry of E (norm defect {defect:e})")]
    NotIsometry { defect: f64 },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
