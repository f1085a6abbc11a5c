use std::path::PathBuf;

use crate::volume::Dims;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: Dims, actual: Dims },

    #[error("data length {len} does not match dims {dims} ({} voxels)", dims.len())]
    Length { dims: Dims, len: usize },

    #[error("index ({i}, {j}, {k}) out of bounds for dims {dims}")]
    Bounds {
        i: usize,
        j: usize,
        k: usize,
        dims: Dims,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("axis {axis}: length {len} is not divisible by decimation rate {rate}")]
    Divisibility {
        axis: usize,
        len: usize,
        rate: usize,
    },

    #[error("non-finite value at voxel {index}")]
    NonFinite { index: usize },

    #[error("dense construction of {n} voxels exceeds the limit of {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad input or IO).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular(_) | Error::Numeric(_) | Error::NonFinite { .. }
        )
    }
}
