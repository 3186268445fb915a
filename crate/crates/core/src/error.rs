use std::path::PathBuf;

use crate::network::Dyad;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("a network needs at least 2 actors, got {0}")]
    TooFewActors(usize),
    #[error("actor {actor} is out of range for a network of {n} actors")]
    ActorOutOfRange { actor: u32, n: usize },
    #[error("self-loop on actor {0} is not allowed")]
    SelfLoop(u32),
    #[error("networks have different actor counts ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("phase containment violated: {0}")]
    Containment(&'static str),
    #[error("no age recorded for extant edge {0}")]
    MissingAge(Dyad),
    #[error("invalid statistic term: {0}")]
    InvalidTerm(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output validation failed for {path}: {reason}")]
    OutputSchema { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration or model parameters,
    /// as opposed to failures while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidTerm(_)
                | Error::InvalidModel(_)
                | Error::InvalidArgument(_)
                | Error::TooFewActors(_)
                | Error::ActorOutOfRange { .. }
                | Error::SelfLoop(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
