use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Dimension {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not the complex adjoint of a quaternion matrix (structure defect {defect:.3e})")]
    NotAdjointImage { defect: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("document error: {0}")]
    Document(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Error {
    Error::Dimension { op, lhs, rhs }
}
