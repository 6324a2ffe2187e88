use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, WectError>;

#[derive(Debug, Error)]
pub enum WectError {
    #[error("grid side must be odd and positive, got {0}")]
    EvenGrid(usize),
    #[error("image data has {found} values, expected {expected}")]
    ImageShape { expected: usize, found: usize },
    #[error("intensity {value} at pixel ({row}, {col}) is outside [0, 1]")]
    IntensityOutOfRange { row: usize, col: usize, value: f64 },
    #[error("threshold {0} must lie in [0, 1)")]
    BadThreshold(f64),
    #[error("unknown weight extension `{0}` (expected max, min or avg)")]
    UnknownExtension(String),
    #[error("simplex weights have not been extended from the vertex weights")]
    WeightsNotExtended,
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("number of directions must be at least 1")]
    NoDirections,
    #[error("invalid direction: {0}")]
    BadDirection(String),
    #[error("need at least 2 samples per direction, got {0}")]
    TooFewSamples(usize),
    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),
    #[error("invalid metric: {0}")]
    BadMetric(String),
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("{0} is not supported for intensity model {1}")]
    UnsupportedModel(&'static str, String),
    #[error("invalid intensity model: {0}")]
    BadModel(String),
    #[error("unknown shape `{0}`")]
    UnknownShape(String),
    #[error("shape does not fit the grid: {0}")]
    ShapeDoesNotFit(String),
    #[error("need at least {min} images, got {found}")]
    TooFewImages { min: usize, found: usize },
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("invalid classifier parameter: {0}")]
    BadClassifier(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
