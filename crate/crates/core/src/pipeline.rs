//! Executing one (sub-)problem: embed, map, sample, unembed.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embed::{find_embedding, metrics, EmbedderParams, Embedding, EmbeddingMetrics};
use crate::error::Result;
use crate::hwgraph::HardwareGraph;
use crate::ising::{IsingModel, SampleSet};
use crate::qmi::{embed_model, ChainStrength};
use crate::sampler::{split_seed, Sampler};
use crate::unembed::{unembed_sampleset, UnembedOptions, UnembedSummary};

/// Where sub-problems are executed.
#[derive(Clone, Debug)]
pub enum Target {
    /// Sample the logical model directly: an ideal device with no
    /// embedding overhead.
    Logical,
    /// Embed onto a hardware graph and sample the physical model.
    Hardware(HardwareTarget),
}

#[derive(Clone, Debug)]
pub struct HardwareTarget {
    pub graph: HardwareGraph,
    pub embedder: EmbedderParams,
    pub chain_strength: ChainStrength,
    pub unembed: UnembedOptions,
}

impl HardwareTarget {
    pub fn new(graph: HardwareGraph) -> Self {
        HardwareTarget {
            graph,
            embedder: EmbedderParams::default(),
            chain_strength: ChainStrength::default(),
            unembed: UnembedOptions::default(),
        }
    }
}

/// An embedding together with its statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedEmbedding {
    pub embedding: Embedding,
    pub metrics: EmbeddingMetrics,
}

impl HardwareTarget {
    /// Embeds the coupling graph of `model`.
    pub fn embed(&self, model: &IsingModel, seed: u64) -> Result<SharedEmbedding> {
        let start = Instant::now();
        let embedding = find_embedding(&model.coupling_graph(), &self.graph, &self.embedder.with_seed(seed))?;
        let mut m = metrics(&embedding, &self.graph);
        m.embed_time = start.elapsed().as_secs_f64();
        Ok(SharedEmbedding { embedding, metrics: m })
    }
}

/// Samples `model` on the target and returns logical samples of `model`.
///
/// For hardware targets, `embedding` must embed the model's coupling graph.
pub fn execute(
    model: &IsingModel,
    target: &Target,
    embedding: Option<&Embedding>,
    sampler: &dyn Sampler,
    seed: u64,
) -> Result<(SampleSet, Option<UnembedSummary>)> {
    match (target, embedding) {
        (Target::Logical, _) => Ok((sampler.sample(model, seed)?, None)),
        (Target::Hardware(hw), Some(e)) => {
            let physical = embed_model(model, e, &hw.graph, hw.chain_strength)?;
            let raw = sampler.sample(&physical, seed)?;
            let (set, summary) = unembed_sampleset(&raw, e, model, hw.unembed, split_seed(seed, u64::MAX))?;
            Ok((set, Some(summary)))
        }
        (Target::Hardware(_), None) => Err(crate::error::Error::InvalidEmbedding(
            "hardware execution requires an embedding".into(),
        )),
    }
}
