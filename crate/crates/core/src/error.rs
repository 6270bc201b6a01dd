use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("conflicting signs for F pair ({src}, {dst})")]
    SignConflict { src: u32, dst: u32 },

    #[error("node {node} out of range for network with {node_count} nodes")]
    NodeOutOfRange { node: u64, node_count: usize },

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("pair ({src}, {dst}) is not an F edge")]
    NotAnFEdge { src: u32, dst: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("cannot place {requested} F edges: only {available} ordered pairs exist")]
    Capacity { requested: u64, available: u64 },

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("partition covers {got} nodes but the network has {expected}")]
    Coverage { expected: usize, got: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Name of the module an error originates from, used to qualify CLI messages.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Parse { .. }
            | Error::SignConflict { .. }
            | Error::NodeOutOfRange { .. }
            | Error::InvalidEdge(_)
            | Error::NotAnFEdge { .. }
            | Error::Domain(_) => "netcore",
            Error::Capacity { .. } | Error::InvalidConfig(_) | Error::UnknownPreset(_) => "synthgen",
            Error::Coverage { .. } | Error::InvalidPartition(_) => "community",
            Error::EmptyTrainingSet | Error::DegenerateTraining(_) | Error::LengthMismatch { .. } => "predictors",
            Error::UndefinedMetric(_) | Error::TooFew { .. } => "evalharness",
            Error::Io { .. } | Error::Json { .. } => "io",
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json { context: context.into(), source }
    }
}
