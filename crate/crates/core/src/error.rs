use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// Variants split into usage errors (bad arguments, undersized images) and
/// I/O or format errors; the CLI maps the former to exit code 2 and the
/// latter to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image dimensions {width}x{height} are invalid: {reason}")]
    InvalidDimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("image {width}x{height} is smaller than the required {min}x{min}")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("window centered at ({row}, {col}) with radius {radius} leaves the {width}x{height} image")]
    WindowOutOfBounds {
        row: usize,
        col: usize,
        radius: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stream overflow: all {0} pixels of the frame were already pushed")]
    StreamOverflow(usize),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's arguments rather than by I/O.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimensions { .. }
                | Error::DimensionMismatch { .. }
                | Error::TooSmall { .. }
                | Error::WindowOutOfBounds { .. }
                | Error::InvalidParameter(_)
                | Error::StreamOverflow(_)
        )
    }
}
