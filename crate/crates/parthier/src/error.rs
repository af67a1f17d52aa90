use std::path::PathBuf;

use parthier_core::ErrorKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A pipeline failure, labelled with the stage that raised it.
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: parthier_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A file that exists but does not hold a valid artifact or image.
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn core(stage: &'static str) -> impl FnOnce(parthier_core::Error) -> Error {
        move |source| Error::Core { stage, source }
    }

    pub fn invalid(path: impl Into<PathBuf>, message: impl Into<String>) -> Error {
        Error::Invalid { path: path.into(), message: message.into() }
    }

    /// Process exit code: 2 for bad input, 3 for numerical failure, 4 when a
    /// resource cap is hit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core { source, .. } => match source.kind() {
                ErrorKind::InputValidation => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::ResourceCap => 4,
            },
            Error::Io { .. } | Error::Invalid { .. } | Error::Usage(_) => 2,
        }
    }
}
