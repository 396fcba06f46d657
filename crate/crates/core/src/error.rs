use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong between loading an image and writing the result.
#[derive(Debug, Error)]
pub enum OsmoseError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("cannot encode {path}: {message}")]
    Encode { path: PathBuf, message: String },

    #[error("unsupported raster format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("non-positive value {value} at index {index}")]
    NonPositive { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("lattice reduction failed: {0}")]
    Reduction(String),

    #[error("exponential action did not converge: {0}")]
    Convergence(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<OsmoseError>,
    },
}

impl OsmoseError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        OsmoseError::InvalidParameter(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        OsmoseError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, OsmoseError>;
