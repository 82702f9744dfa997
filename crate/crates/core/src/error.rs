use thiserror::Error;

/// Failures of the geometric pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("tangent vectors have rank {rank} < {expected}: degenerate immersion")]
    DegenerateImmersion { rank: usize, expected: usize },
    #[error("induced metric is degenerate (|det| = {det:e}, threshold {threshold:e})")]
    DegenerateMetric { det: f64, threshold: f64 },
    #[error("induced metric has the wrong signature for this background ({negative} negative eigenvalues)")]
    SignatureMismatch { negative: usize },
    #[error("normal frame gauge fixing failed: {0}")]
    GaugeFailure(String),
    #[error("boundary normal is null (gamma(eta, eta) = {norm:e}); massless edge regime")]
    NullBoundary { norm: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
