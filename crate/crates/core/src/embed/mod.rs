//! Minor embedding of a logical coupling graph into a hardware graph.
//!
//! An [`Embedding`] maps every program qubit to a chain of physical qubits.
//! It is valid when chains are non-empty and pairwise disjoint, each chain
//! induces a connected subgraph, and every logical edge is realised by at
//! least one hardware coupler between the two chains.

mod heuristic;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hwgraph::HardwareGraph;
use crate::ising::{CouplingGraph, QubitId};

pub use heuristic::{find_embedding, EmbedderParams, HISTORY_STEP, OVERUSE_BASE, ROUTING_PASSES};

/// Program qubit → chain of physical qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub chains: BTreeMap<QubitId, BTreeSet<QubitId>>,
}

impl Embedding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_chains<I, C>(chains: I) -> Self
    where
        I: IntoIterator<Item = (QubitId, C)>,
        C: IntoIterator<Item = QubitId>,
    {
        Embedding {
            chains: chains
                .into_iter()
                .map(|(q, c)| (q, c.into_iter().collect()))
                .collect(),
        }
    }

    pub fn chain(&self, q: QubitId) -> Option<&BTreeSet<QubitId>> {
        self.chains.get(&q)
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Physical qubits used by any chain.
    pub fn physical_qubits(&self) -> BTreeSet<QubitId> {
        self.chains.values().flatten().copied().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingChain(QubitId),
    EmptyChain(QubitId),
    UnknownPhysical { program: QubitId, physical: QubitId },
    Overlap { physical: QubitId, first: QubitId, second: QubitId },
    Disconnected(QubitId),
    MissingCoupler(QubitId, QubitId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingChain(q) => write!(f, "program qubit {q} has no chain"),
            Violation::EmptyChain(q) => write!(f, "chain of program qubit {q} is empty"),
            Violation::UnknownPhysical { program, physical } => {
                write!(f, "chain of {program} uses {physical}, which is not in the hardware graph")
            }
            Violation::Overlap {
                physical,
                first,
                second,
            } => write!(f, "physical qubit {physical} is shared by chains {first} and {second}"),
            Violation::Disconnected(q) => write!(f, "chain of program qubit {q} is not connected"),
            Violation::MissingCoupler(a, b) => {
                write!(f, "no hardware coupler joins the chains of {a} and {b}")
            }
        }
    }
}

/// Checks every embedding condition and lists all violations found.
pub fn validate(e: &Embedding, source: &CouplingGraph, hw: &HardwareGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner: BTreeMap<QubitId, QubitId> = BTreeMap::new();

    for &q in &source.nodes {
        match e.chain(q) {
            None => out.push(Violation::MissingChain(q)),
            Some(c) if c.is_empty() => out.push(Violation::EmptyChain(q)),
            Some(_) => {}
        }
    }
    for (&q, chain) in &e.chains {
        for &p in chain {
            if !hw.contains(p) {
                out.push(Violation::UnknownPhysical {
                    program: q,
                    physical: p,
                });
            }
            if let Some(&first) = owner.get(&p) {
                out.push(Violation::Overlap {
                    physical: p,
                    first,
                    second: q,
                });
            } else {
                owner.insert(p, q);
            }
        }
        if !chain.is_empty() && !is_connected(chain, hw) {
            out.push(Violation::Disconnected(q));
        }
    }
    for &(a, b) in &source.edges {
        let (Some(ca), Some(cb)) = (e.chain(a), e.chain(b)) else {
            continue;
        };
        if ca.is_empty() || cb.is_empty() {
            continue;
        }
        let joined = ca.iter().any(|&p| hw.neighbors(p).any(|x| cb.contains(&x)));
        if !joined {
            out.push(Violation::MissingCoupler(a, b));
        }
    }
    out
}

pub fn is_valid(e: &Embedding, source: &CouplingGraph, hw: &HardwareGraph) -> bool {
    validate(e, source, hw).is_empty()
}

/// Returns an error carrying the first violation, if any.
pub fn ensure_valid(e: &Embedding, source: &CouplingGraph, hw: &HardwareGraph) -> Result<()> {
    let v = validate(e, source, hw);
    match v.first() {
        None => Ok(()),
        Some(first) => Err(Error::InvalidEmbedding(format!(
            "{first} ({} violation(s) in total)",
            v.len()
        ))),
    }
}

fn is_connected(chain: &BTreeSet<QubitId>, hw: &HardwareGraph) -> bool {
    let Some(&start) = chain.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for x in hw.neighbors(p) {
            if chain.contains(&x) && seen.insert(x) {
                queue.push_back(x);
            }
        }
    }
    seen.len() == chain.len()
}

/// Chain-length statistics of an embedding on a given device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMetrics {
    pub avg_chain_len: f64,
    pub max_chain_len: usize,
    /// Population variance of chain lengths.
    pub chain_len_variance: f64,
    pub used_qubits: usize,
    pub unused_qubits: usize,
    /// Wall-clock seconds spent finding the embedding, when known.
    pub embed_time: f64,
}

pub fn metrics(e: &Embedding, hw: &HardwareGraph) -> EmbeddingMetrics {
    let lens: Vec<usize> = e.chains.values().map(BTreeSet::len).collect();
    let used: usize = lens.iter().sum();
    let count = lens.len().max(1) as f64;
    let avg = used as f64 / count;
    let var = lens.iter().map(|&l| (l as f64 - avg).powi(2)).sum::<f64>() / count;
    EmbeddingMetrics {
        avg_chain_len: avg,
        max_chain_len: lens.iter().copied().max().unwrap_or(0),
        chain_len_variance: var,
        used_qubits: used,
        unused_qubits: hw.num_nodes().saturating_sub(used),
        embed_time: 0.0,
    }
}
