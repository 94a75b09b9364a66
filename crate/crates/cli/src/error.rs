use std::process::ExitCode;

use delc_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for anything the user can fix in the configuration, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        let config = match self {
            CliError::Config(_) => true,
            CliError::Core(e) => matches!(
                e,
                CoreError::Configuration(_)
                    | CoreError::UnknownCriterion(_)
                    | CoreError::Domain(_)
                    | CoreError::EmptyGrid(_)
                    | CoreError::GridTooCoarse { .. }
                    | CoreError::InvalidMode { .. }
                    | CoreError::InvalidBipartition(_)
            ),
            CliError::Io(_) | CliError::Failed(_) => false,
        };
        ExitCode::from(if config { 2 } else { 1 })
    }
}
