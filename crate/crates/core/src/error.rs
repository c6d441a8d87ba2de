use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("particle {index} at {position:?} lies outside the non-periodic domain")]
    OutsideDomain { index: usize, position: [f64; 3] },

    #[error("invalid particle id {0}")]
    InvalidParticle(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("non-finite state at step {step} (t = {time:e}): {field} of particle {index}")]
    NonFinite {
        step: u64,
        time: f64,
        field: &'static str,
        index: usize,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
