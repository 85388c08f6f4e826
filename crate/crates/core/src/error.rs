use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the matting pipeline.
#[derive(Debug, Error)]
pub enum MattingError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("unsupported image format in {}: {reason}", path.display())]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("trimap has no {0} pixels")]
    NoKnownPixels(&'static str),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("PNG decode error: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("PNG encode error: {0}")]
    PngEncode(#[from] png::EncodingError),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("trimap has no foreground boundary pixels to sample from")]
    NoForegroundSamples,

    #[error("trimap has no background boundary pixels to sample from")]
    NoBackgroundSamples,

    #[error("image is {width}x{height}; the matting Laplacian needs at least 3x3")]
    ImageTooSmall { width: usize, height: usize },

    #[error("lambda {0} is outside [0, 1]")]
    BadLambda(f64),

    #[error("trimap has no unknown pixels")]
    NoUnknownPixels,

    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation region is empty")]
    EmptyRegion,

    #[error("baseline MSE is zero; PIMP is undefined")]
    ZeroBaseline,

    #[error("no ground truth available for {0}")]
    MissingGroundTruth(String),

    #[error("no coarse level {level} trimap for {name}")]
    MissingTrimap { name: String, level: u8 },

    #[error("no usable benchmark entries under {}", .0.display())]
    EmptyDataset(PathBuf),
}

pub type Result<T, E = MattingError> = std::result::Result<T, E>;
