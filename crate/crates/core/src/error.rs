use thiserror::Error;

use crate::config::ConfigError;

/// Errors that abort a run.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// An accounting ledger or capacity bound was broken. This is a bug, never
    /// an expected outcome of a scenario.
    #[error("invariant violated at t={t_s}s: {detail}")]
    Invariant { t_s: u64, detail: String },
    #[error("illegal application transition: {0}")]
    Transition(#[from] crate::model::TransitionError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Io { .. } => 1,
            SimError::Invariant { .. } | SimError::Transition(_) => 3,
        }
    }
}
