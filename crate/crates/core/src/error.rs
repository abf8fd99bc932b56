use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("weight matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("weight matrix is zero")]
    ZeroWeight,
    #[error("operands are bound to different weights")]
    ContextMismatch,
    #[error("vector lies in the null cone of the A-seminorm")]
    ANullVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not A-bounded (residual {residual:.3e})")]
    NotABounded { residual: f64 },
    #[error("operator is not A-adjointable (residual {residual:.3e})")]
    NotAAdjointable { residual: f64 },
    #[error("block ({row}, {col}) is not A-adjointable")]
    BlockNotAAdjointable { row: usize, col: usize },
    #[error("block ({row}, {col}) is not A-bounded")]
    BlockNotABounded { row: usize, col: usize },
    #[error("weight has zero rank")]
    ZeroRank,
    #[error("requested rank {rank} is outside 1..={n}")]
    BadRank { rank: usize, n: usize },
    #[error("blocks are not norm-parallel (margin {margin:.3e})")]
    PreconditionNotParallel { margin: f64 },
    #[error("block ({row}, {col}) below the diagonal is nonzero")]
    NotUpperTriangular { row: usize, col: usize },
    #[error("block operator has {found} block rows, this check needs {expected}")]
    BlockCount { expected: usize, found: usize },
    #[error("unknown check `{0}`")]
    UnknownCheckName(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Mathematical precondition failures, as opposed to malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotABounded { .. }
                | Error::NotAAdjointable { .. }
                | Error::BlockNotAAdjointable { .. }
                | Error::BlockNotABounded { .. }
                | Error::ANullVector
                | Error::ZeroRank
                | Error::PreconditionNotParallel { .. }
                | Error::NotUpperTriangular { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
