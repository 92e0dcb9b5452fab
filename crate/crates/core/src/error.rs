use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Resource,
    Numerical,
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex counts differ ({left} vs {right})")]
    VertexCountMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is not regular (degrees range over {min_deg}..={max_deg})")]
    NotRegular { min_deg: usize, max_deg: usize },

    #[error("random regular generation gave up after {restarts} restarts")]
    GenerationFailed { restarts: usize },

    #[error("{what} exceeded its limit of {limit} (reached {partial} before stopping)")]
    ResourceLimit {
        what: &'static str,
        limit: u64,
        partial: u64,
    },

    #[error("simplex stopped after {iterations} iterations; best feasible objective {objective}")]
    IterationLimit {
        iterations: usize,
        objective: f64,
        incumbent: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::VertexOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::VertexCountMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::NotRegular { .. }
            | Error::Io(_) => ErrorKind::Input,
            Error::GenerationFailed { .. } | Error::ResourceLimit { .. } => ErrorKind::Resource,
            Error::IterationLimit { .. } | Error::Numerical(_) => ErrorKind::Numerical,
            Error::Invariant(_) => ErrorKind::Invariant,
            Error::Stage { source, .. } => source.kind(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
