use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Invalid configuration or spec parameters. Carries one message per
    /// offending field so a whole config file can be reported at once.
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }

    /// Process exit code contract: 2 for config errors, 3 for runtime
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
