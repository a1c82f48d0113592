use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("matrix is numerically defective (eigenvector condition {0:e})")]
    DefectiveMatrix(f64),
    #[error("decomposition failed: {0}")]
    DecompositionFailure(&'static str),
    #[error("filter synthesis failed: {0}")]
    FilterSynthesisFailure(String),
    #[error("covering too large: {0} points")]
    CoverTooLarge(u64),
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("dimension too large: {0}")]
    DimensionTooLarge(String),
    #[error("internal error: {0}")]
    InternalError(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
