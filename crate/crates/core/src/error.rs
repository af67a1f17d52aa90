use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InputValidation,
    Numerical,
    ResourceCap,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty foreground")]
    EmptyForeground,
    #[error("multiple components: shape has {0} 8-connected foreground components")]
    MultipleComponents(usize),
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("degenerate field: the positive region is empty")]
    EmptyPositiveRegion,
    #[error("empty seed list")]
    EmptySeeds,
    #[error("too many splits to enumerate: {found} > {max}")]
    TooManySplits { found: usize, max: usize },
    #[error("association graph has {found} vertices, cap is {cap}")]
    VertexCapExceeded { found: usize, cap: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence { .. } | Error::EmptyPositiveRegion => ErrorKind::Numerical,
            Error::TooManySplits { .. } | Error::VertexCapExceeded { .. } => ErrorKind::ResourceCap,
            _ => ErrorKind::InputValidation,
        }
    }
}
