use crate::ising::QubitId;
use thiserror::Error;

/// Errors raised by the modelling, embedding and pipeline layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("assignment is missing model variable {0}")]
    MissingVariable(QubitId),

    #[error("qubit {0} is not a variable of the model")]
    UnknownQubit(QubitId),

    #[error("model has {vars} variables, exhaustive search is limited to {limit}")]
    TooLarge { vars: usize, limit: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid hardware graph: {0}")]
    InvalidGraph(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("logical coupler ({0}, {1}) has no hardware coupler between its chains")]
    ZeroCoupler(QubitId, QubitId),

    #[error("embedding failed after {attempts} attempt(s); best partial embedding placed {best_placed} of {total} qubits")]
    EmbeddingFailed {
        attempts: usize,
        best_placed: usize,
        total: usize,
    },

    #[error("embedding timed out after {0:.3} s")]
    EmbeddingTimeout(f64),

    #[error("cut count {c} out of range (max {max})")]
    CutsOutOfRange { c: usize, max: usize },

    #[error("decoded sample and fixing overlap on qubit {0}")]
    Overlap(QubitId),

    #[error("sub-problem {index}: {source}")]
    SubProblem {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Strips `SubProblem` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::SubProblem { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_embedding_failure(&self) -> bool {
        matches!(
            self.root(),
            Error::EmbeddingFailed { .. } | Error::EmbeddingTimeout(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
