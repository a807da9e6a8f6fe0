use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in input to {op} at index {index}")]
    NonFinite { op: &'static str, index: usize },

    #[error("zero diagonal entry at row {row}")]
    ZeroDiagonal { row: usize },

    #[error("matrix is singular to working precision (pivot column {column})")]
    Singular { column: usize },

    #[error("invalid CSR structure: {0}")]
    InvalidCsr(String),

    #[error("degenerate element {element}: Jacobian determinant {det:e} at a quadrature point")]
    DegenerateElement { element: usize, det: f64 },

    #[error("hanging node {node} is listed as a master of hanging node {hanging}")]
    HangingMaster { node: usize, hanging: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("index {index} out of range (size {size}) in {op}")]
    OutOfRange {
        op: &'static str,
        index: usize,
        size: usize,
    },

    #[error("wrong component count in {op}: expected {expected}, got {got}")]
    ComponentCount {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("configuration error at line {line}, key `{key}`: {message}")]
    Config {
        key: String,
        line: usize,
        message: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dim(op: &'static str, expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { op, expected, got }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
