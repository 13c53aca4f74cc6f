use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Config validation problems; one message per offending key.
    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error(transparent)]
    Core(#[from] critwave_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Runtime(String),
}

impl LabError {
    /// CLI exit code: 1 invariant failure, 2 config error, 3 runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Invariant(_) => 1,
            LabError::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
