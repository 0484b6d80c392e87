use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad flag or flag value; `flag` names the offending option.
    #[error("{flag}: {message}")]
    Usage { flag: String, message: String },

    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Engine(#[from] coupled_logistic::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("server error: {0}")]
    Server(String),
}

impl LabError {
    pub fn usage(flag: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Usage { flag: flag.into(), message: message.into() }
    }

    /// 1 usage, 2 domain, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        use coupled_logistic::Error as E;
        match self {
            LabError::Usage { .. } | LabError::Config { .. } => 1,
            LabError::Engine(e) if e.is_non_convergence() => 3,
            LabError::Engine(E::InvalidParams { .. } | E::InvalidArgument(_)) => 1,
            LabError::Engine(_) => 2,
            LabError::Io(_) | LabError::Server(_) => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
