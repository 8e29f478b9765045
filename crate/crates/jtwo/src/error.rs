use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix shape: {0}")]
    Shape(String),
    #[error("degree {degree} outside range (max {max})")]
    DegreeOutOfRange { degree: i64, max: i64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("3-adic precision exhausted: {0}")]
    Precision(String),
    #[error("fixture mismatch: {name}\n{diff}")]
    FixtureMismatch { name: String, diff: String },
    #[error("conflicting extension rules at degree {0}")]
    RuleConflict(i64),
    #[error("unresolved action on {0}")]
    Unresolved(String),
    #[error("seam mismatch at degree {0}: {1}")]
    Seam(i64, String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(msg: impl Into<String>) -> Error {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
