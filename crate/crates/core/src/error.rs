use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// Non-physical state, e.g. a collapsed vessel (A <= 0).
    #[error("state error at node {node}, t = {time:e}{}: {detail}", stage_suffix(*.stage))]
    State {
        node: usize,
        time: f64,
        stage: Option<u8>,
        detail: String,
    },

    #[error("solution blew up at step {step} (t = {time:e})")]
    BlowUp { step: usize, time: f64 },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

fn stage_suffix(stage: Option<u8>) -> String {
    match stage {
        Some(s) => format!(", RK stage {s}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn with_stage(self, stage: u8) -> Self {
        match self {
            Error::State {
                node, time, detail, ..
            } => Error::State {
                node,
                time,
                stage: Some(stage),
                detail,
            },
            other => other,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::State { .. } | Error::BlowUp { .. } | Error::Internal(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
