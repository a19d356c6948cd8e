use std::path::PathBuf;

use crate::raster::pnm::PnmError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Pnm {
        path: PathBuf,
        #[source]
        source: PnmError,
    },

    #[error("invalid manifest {path}: {reason}")]
    Manifest { path: PathBuf, reason: String },

    #[error("item {index} ({label}): {source}")]
    Item {
        index: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch { left_width: usize, left_height: usize, right_width: usize, right_height: usize },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("shape does not fit in a {width}x{height} frame")]
    ShapeOutOfFrame { width: usize, height: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mask has no foreground pixels")]
    EmptyMask,

    #[error("spectrum has zero total power")]
    DegenerateSpectrum,

    #[error("need at least {needed} observations for degree {degree}, got {got}")]
    TooFewObservations { needed: usize, degree: usize, got: usize },

    #[error("regressor is constant; polynomial fit is undefined")]
    DegenerateRegressor,

    #[error("design matrix is rank deficient (rank {rank} < {columns})")]
    RankDeficient { rank: usize, columns: usize },

    #[error("n - k - 1 = {0} <= 0; adjusted R² and AICc are undefined")]
    NoResidualDof(i64),

    #[error("no degree in the requested range produced a valid AICc")]
    NoValidModel,

    #[error("fixture parse error: {0}")]
    Fixture(String),
}

/// Broad failure class, for callers that map errors to exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A file could not be read, written or decoded.
    Io,
    /// Arguments or input content failed validation.
    Invalid,
    /// The computation itself is undefined for the given data.
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Pnm { .. } => ErrorKind::Io,
            Error::Item { source, .. } => source.kind(),
            Error::Manifest { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidRaster(_)
            | Error::ShapeOutOfFrame { .. }
            | Error::InvalidParameter(_)
            | Error::Fixture(_) => ErrorKind::Invalid,
            Error::EmptyMask
            | Error::DegenerateSpectrum
            | Error::TooFewObservations { .. }
            | Error::DegenerateRegressor
            | Error::RankDeficient { .. }
            | Error::NoResidualDof(_)
            | Error::NoValidModel => ErrorKind::Numeric,
        }
    }
}
