use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A pipeline stage failed; artifacts written so far are kept.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },

    #[error(transparent)]
    Core(#[from] fsamp_core::Error),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("rerun mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn at(stage: &'static str) -> impl FnOnce(CliError) -> CliError {
        move |e| match e {
            CliError::Stage { .. } => e,
            other => CliError::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// Process exit code: 2 bad parameters or input, 3 numerical failure,
    /// 4 I/O.
    pub fn exit_code(&self) -> u8 {
        use fsamp_core::Error as E;
        match self {
            CliError::Stage { source, .. } => source.exit_code(),
            CliError::Core(E::Io(_)) | CliError::Io(_) => 4,
            CliError::Core(E::Json(e)) | CliError::Json(e) if e.is_io() => 4,
            CliError::Core(E::Numerical(_)) | CliError::NotConverged(_) | CliError::Mismatch(_) => 3,
            _ => 2,
        }
    }
}
