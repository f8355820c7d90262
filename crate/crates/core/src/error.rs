use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by map handling, the measures and the meta-measure harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported image format in {path}: {message}")]
    UnsupportedFormat { path: PathBuf, message: String },

    #[error("image {0} has zero width or height")]
    EmptyImage(PathBuf),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ground truth has no foreground pixels")]
    EmptyForeground,

    #[error("ground truth is constant (needs both foreground and background)")]
    ConstantGroundTruth,

    #[error("wrong curve kind: expected {expected}")]
    WrongCurveKind { expected: &'static str },

    #[error("id mismatch: {0}")]
    IdMismatch(String),

    #[error("no qualifying images")]
    NoQualifyingImages,

    #[error("{0}")]
    Manifest(String),

    #[error("malformed CSV: {0}")]
    Csv(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(left: (usize, usize), right: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_w: left.0,
            left_h: left.1,
            right_w: right.0,
            right_h: right.1,
        }
    }
}
