use thiserror::Error;

/// Errors raised by the geometry, map, and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rotation axis has zero length")]
    ZeroAxis,

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("point lies on the antidiagonal, where the circle action has no axis")]
    Antidiagonal,

    #[error("point lies on the diagonal, which is deleted by the compactification")]
    OnDiagonal,

    #[error("covector norm {norm} is outside the open unit disc")]
    OutsideDisc { norm: f64 },

    #[error("parameter `{name}` = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("profile construction failed: {0}")]
    Profile(String),

    #[error("quadrature value {value} is not within {tol} of an integer; raise the node count")]
    Resolution { value: f64, tol: f64 },

    #[error("loop undersampled: angle jump {jump:.3} rad at sample {index}; raise the loop sample count")]
    Undersampled { index: usize, jump: f64 },

    #[error("invalid matrix loop: {0}")]
    InvalidLoop(String),

    #[error("homology matrices disagree between basepoint choices: {first:?} vs {second:?}")]
    BasepointDisagreement {
        first: [[i64; 2]; 2],
        second: [[i64; 2]; 2],
    },

    #[error("profile table parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
