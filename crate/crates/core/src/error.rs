use std::path::PathBuf;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("non-finite coefficient vector {0:?}")]
    NonFinite([f64; 4]),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown gate name `{0}`")]
    UnknownGate(String),

    #[error("unknown {kind} `{value}`")]
    UnknownVariant { kind: &'static str, value: String },

    #[error("parameter tensor does not match method {method}: expected {expected} values, got {got}")]
    ParamShape {
        method: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("netlist line {line}: {msg}")]
    Netlist { line: usize, msg: String },

    #[error("training diverged at iteration {iter}: loss = {loss}")]
    Diverged { iter: usize, loss: f64 },

    #[error("empty accuracy history")]
    EmptyHistory,

    #[error("basis with beta = 0 is degenerate for coverage/coherence/bias metrics")]
    DegenerateBasis,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
