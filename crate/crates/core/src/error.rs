use std::path::PathBuf;

use thiserror::Error;

use crate::mapping::Core;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("placement needs {needed} atoms but the grid holds at most {max_atoms}")]
    Capacity { needed: usize, max_atoms: usize },

    #[error("placement layout {need_w}x{need_h} does not fit the {width}x{height} grid")]
    LayoutDoesNotFit {
        need_w: usize,
        need_h: usize,
        width: usize,
        height: usize,
    },

    #[error("cores {a} and {b} are not within each other's T reach")]
    OutOfReach { a: Core, b: Core },

    #[error("exchange consistency: {0}")]
    Consistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }
}
