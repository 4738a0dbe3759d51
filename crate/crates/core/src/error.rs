use thiserror::Error;

use crate::jets::JetError;

/// Errors raised while evaluating geometric objects at chart points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {point:?} on chart `{chart}` violates guard `{guard}`")]
    Guard { chart: String, point: [f64; 4], guard: String },
    #[error("{source} at point {point:?} on chart `{chart}`")]
    Domain {
        chart: String,
        point: [f64; 4],
        #[source]
        source: JetError,
    },
    #[error("singular matrix at point {point:?} (|det| = {det:e}, scale {scale:e})")]
    Singular { point: [f64; 4], det: f64, scale: f64 },
    #[error("field lives on chart `{expected}` but the point is on `{found}`")]
    ChartMismatch { expected: String, found: String },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
