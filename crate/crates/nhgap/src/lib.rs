//! File formats, reports and the command-line driver for `nhgap-core`.

pub mod cli;
pub mod io;
pub mod report;
pub mod threaded;

pub use nhgap_core as core;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] nhgap_core::Error),
    #[error("input: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(String),
    #[error("filter of degree {0} failed grid certification")]
    Uncertified(usize),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// 2 for promise violations, 3 for malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use nhgap_core::Error as E;
        match self {
            CliError::Core(E::PromiseViolation(_)) => 2,
            CliError::Schema(_) | CliError::Core(E::InvalidMatrix(_) | E::InvalidArgument(_) | E::InvalidState(_)) => 3,
            _ => 1,
        }
    }
}
