use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("duplicate value {value:?} in {list}")]
    DuplicateValue { list: String, value: String },

    #[error("structure {structure} cannot be generated: {reason}")]
    Generation { structure: String, reason: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unknown factor {0:?}")]
    UnknownFactor(String),

    #[error("unknown value {value:?} for factor {factor:?}")]
    UnknownValue { factor: String, value: String },

    #[error("empty sample space for factor {factor:?}, value {value:?}")]
    EmptySampleSpace { factor: String, value: String },

    #[error("metric {metric}: {message}")]
    Metric { metric: String, message: String },

    #[error("degenerate representation: {0}")]
    Degenerate(String),

    #[error("AUC undefined: targets contain a single class")]
    UndefinedAuc,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("decoder transport error at position {position}: {message}")]
    Transport {
        position: usize,
        message: String,
        partial: Vec<String>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn metric(metric: &str, message: impl Into<String>) -> Self {
        Error::Metric {
            metric: metric.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for I/O and transport failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Transport { .. } => 2,
            _ => 1,
        }
    }
}
