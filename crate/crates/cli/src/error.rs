use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(shallownet::Error),

    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 2 for bad configuration, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            _ => 1,
        }
    }
}

impl From<shallownet::Error> for CliError {
    fn from(e: shallownet::Error) -> Self {
        use shallownet::Error as E;
        match e {
            e if e.is_solver_failure() => CliError::Solver(e),
            E::Io(source) => CliError::Io { path: "<output>".into(), source },
            E::Csv(e) => CliError::Csv(e),
            E::Json(e) => CliError::Json(e),
            other => CliError::Config(other.to_string()),
        }
    }
}
