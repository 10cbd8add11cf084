use thiserror::Error;

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(gibbswave_core::Error),
    #[error("inconclusive statistics: {0}")]
    Inconclusive(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 invalid configuration, 2 numerical abort, 3 inconclusive statistics.
    /// Unwritable outputs count as configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }
}

impl From<gibbswave_core::Error> for CliError {
    fn from(e: gibbswave_core::Error) -> Self {
        use gibbswave_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::NonFiniteInput => CliError::Config(e.to_string()),
            E::GramCheck { .. }
            | E::RejectionLimit { .. }
            | E::NonFinite { .. }
            | E::PicardDiverged { .. } => CliError::Numerical(e),
        }
    }
}
