use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: expected {expected}, got {got}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("{op} requires a square operator, got {rows}x{cols}")]
    NonSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("operator is not symmetric: max asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),

    #[error("spectral function undefined at eigenvalue {lambda:e}")]
    SpectralFnUndefined { lambda: f64 },

    #[error("empty sample set")]
    EmptySample,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle of dimension {dim} exceeds cap {cap}")]
    OracleTooLarge { dim: usize, cap: usize },

    #[error("model has no closed-form conditional expectation")]
    NoClosedForm,

    #[error("strategy qualification {available} is below required {required}")]
    Qualification { required: f64, available: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ingestion error at line {line}: {message}")]
    Ingest { line: u64, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            expected: expected.into(),
            got: got.into(),
        }
    }
}
