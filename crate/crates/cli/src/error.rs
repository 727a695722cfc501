use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("malformed JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },

    #[error(transparent)]
    Solver(#[from] sturm_core::Error),

    /// A check reported FAIL.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 failed check, 2 invalid input, 3 forward failure, 4 data outside
    /// the solvable range, 5 polynomial extraction failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Validation(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
            CliError::Solver(e) => solver_code(e),
        }
    }
}

fn solver_code(e: &sturm_core::Error) -> u8 {
    use sturm_core::Error::*;
    match e {
        InvalidInput(_)
        | GridTooSmall(_)
        | GridMismatch
        | NonFinite(_)
        | NonMonic(_)
        | CommonRoot(..)
        | DegreeMismatch { .. }
        | CountMismatch { .. }
        | PrefixMismatch(_) => 2,
        DeltaTooLarge { .. } | SingularSystem { .. } => 4,
        ExtractionResidual { .. } => 5,
        SweepFailure { source, .. } => solver_code(source),
        _ => 3,
    }
}
