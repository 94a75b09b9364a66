use thiserror::Error;

/// Errors raised by the model, criteria, spectrum and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid mode {mode} for a {n_modes}-mode system")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical failure in {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("singular denominator in {0}")]
    Singular(String),

    #[error("no real resonance: discriminant {discriminant} < 0")]
    NoRealResonance { discriminant: f64 },

    #[error("grid too coarse: step {step} exceeds limit {limit}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error("unknown criterion label `{0}`")]
    UnknownCriterion(String),

    #[error("truncation leakage {leakage:e} exceeds threshold {threshold:e}")]
    Truncation { leakage: f64, threshold: f64 },

    #[error("cannot normalize an all-zero spectrum")]
    Normalization,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
