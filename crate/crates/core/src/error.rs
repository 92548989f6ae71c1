use thiserror::Error;

/// Errors produced by the sampling, basis-selection and compression routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is numerically singular (zero pivot)")]
    SingularMatrix,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error(
        "analytic gradient disagrees with finite differences at (u, v) = ({u}, {v}): \
         ({ga}, {gb}) vs ({fa}, {fb})"
    )]
    GradientMismatch {
        u: f64,
        v: f64,
        ga: f64,
        gb: f64,
        fa: f64,
        fb: f64,
    },

    #[error("point {index} lies outside the basis bounding box")]
    PointOutsideBox { index: usize },

    #[error("no sample point fell inside the region ({m0} attempts)")]
    EmptySample { m0: usize },

    #[error("scene description: {0}")]
    Scene(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("scene JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
