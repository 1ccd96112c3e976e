use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("generation failed: {0}")]
    GenerationFailure(String),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid vertex set: {0}")]
    InvalidVertexSet(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported prediction: {0}")]
    Unsupported(String),

    #[error("instance too large for exact enumeration: {0}")]
    InstanceTooLarge(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
