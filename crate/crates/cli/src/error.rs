use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] g2flow_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    ConfigError = 1,
    ToleranceFailure = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Combines the statuses of several runs; a configuration error wins
    /// over a tolerance failure, which wins over success.
    pub fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::ConfigError, _) | (_, Status::ConfigError) => Status::ConfigError,
            (Status::ToleranceFailure, _) | (_, Status::ToleranceFailure) => Status::ToleranceFailure,
            _ => Status::Ok,
        }
    }
}
