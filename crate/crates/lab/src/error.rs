use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] cdma_capacity::Error),

    #[error("{failed} of {total} grid points did not converge")]
    NonConverged { failed: usize, total: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Input {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

/// 0 success, 1 usage or parse, 2 solver non-convergence, 3 resource guard.
pub fn exit_code(result: &Result<(), LabError>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(LabError::NonConverged { .. })
        | Err(LabError::Core(cdma_capacity::Error::NonConvergence { .. })) => 2,
        Err(LabError::Core(cdma_capacity::Error::Resource { .. })) => 3,
        Err(_) => 1,
    }
}
