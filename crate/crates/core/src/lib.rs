//! Chain-aware pruning for minor-embedded Ising problems.
//!
//! The crate models Ising problems, embeds them onto annealer hardware
//! graphs, samples them, and recovers logical solutions. On top of that
//! pipeline it implements two pruning schemes that fix the qubits whose
//! chains dominate an embedding: [`skipper`] enumerates every fixing of
//! the cut qubits, [`skipperg`] descends greedily one cut at a time.

pub mod bench;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod hwgraph;
pub mod ising;
pub mod pipeline;
pub mod qmi;
pub mod runtime;
pub mod sampler;
pub mod skipper;
pub mod skipperg;
pub mod unembed;

pub use error::{Error, Result};
pub use ising::{Assignment, IsingModel, QubitId, Sample, SampleSet, Spin};

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Io(_) => 3,
        e if e.is_embedding_failure() => 4,
        Error::Parameter(_)
        | Error::InvalidModel(_)
        | Error::InvalidGraph(_)
        | Error::CutsOutOfRange { .. }
        | Error::TooLarge { .. }
        | Error::Json(_) => 2,
        _ => 1,
    }
}
