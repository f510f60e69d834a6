use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid diagram point: {0}")]
    InvalidPoint(String),

    #[error("infinite death at point {index}; cap the diagram first")]
    InfiniteDeath { index: usize },

    #[error("cap {cap} is below the finite death value {death}")]
    CapTooSmall { cap: f64, death: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("filtration is not monotone: face {face:?} ({face_value}) enters after coface {coface:?} ({coface_value})")]
    NotMonotone {
        face: Vec<usize>,
        face_value: f64,
        coface: Vec<usize>,
        coface_value: f64,
    },

    #[error("complex has a cell {0:?} whose face is missing")]
    MissingFace(Vec<usize>),

    #[error("complex too large for the dense oracle: {cells} cells (limit {limit})")]
    TooLarge { cells: usize, limit: usize },

    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel evaluation failed for pair ({i}, {j}): {source}")]
    GramEntry {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is not symmetric: |G[{i}][{j}] - G[{j}][{i}]| = {gap}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("training needs at least two classes, found {0}")]
    SingleClass(usize),

    #[error("solver did not converge within {iterations} iterations (KKT gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("every cross-validation fold was skipped")]
    AllFoldsSkipped,
}
