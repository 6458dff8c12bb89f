//! Point-cloud and correspondence files.

mod correspondences;
mod ply;

use std::path::PathBuf;

use thiserror::Error;

pub use correspondences::{load_correspondences, read_correspondences, save_correspondences, write_correspondences};
pub use ply::{load_point_cloud, parse_ply, save_point_cloud, write_ply, PlyFormat};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("PLY header at byte {offset}: {message}")]
    PlyHeader { offset: usize, message: String },

    #[error("PLY body at byte {offset}: {message}")]
    PlyBody { offset: usize, message: String },

    #[error("unsupported PLY encoding `{0}`")]
    UnsupportedEncoding(String),

    #[error("line {line}: expected 6 columns, found {found}")]
    Arity { line: u64, found: usize },

    #[error("line {line}: `{field}` is not a number")]
    NotNumeric { line: u64, field: String },

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Invalid(#[from] crate::Error),
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::File {
            path: path.into(),
            source,
        }
    }
}
