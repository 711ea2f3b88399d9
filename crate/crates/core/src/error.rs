use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, WorkbenchError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkbenchError {
    #[error("matrix dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("site index {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigen-decomposition failed: {0}")]
    EigenFailure(String),

    #[error("eigenvalue cluster of size {size} at {value} (gap {gap:.3e})")]
    DegenerateCluster {
        value: Complex64,
        size: usize,
        gap: f64,
    },

    #[error("rank deficient system: effective rank {rank} of {cols}")]
    RankDeficient { rank: usize, cols: usize },

    #[error("polynomial has degree 0")]
    DegreeZero,

    #[error("pole in {what} at u = {at}")]
    Pole { what: String, at: Complex64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("gauge matrix is singular (xi = {xi})")]
    GaugeSingular { xi: Complex64 },

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("Q extraction failed: fit residual {residual:.3e} exceeds {tol:.3e}")]
    ExtractionFailed { residual: f64, tol: f64 },

    #[error("Bethe state vanished at root {root}")]
    DegenerateState { root: Complex64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
