use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("kinematically infeasible energies E0={e0} keV, E1={e1} keV (B={b})")]
    Infeasible { e0: f64, e1: f64, b: f64 },

    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },

    #[error("viewpoint for agent {agent} at t={t} is not after t={last}")]
    Ordering { agent: u32, t: f64, last: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
