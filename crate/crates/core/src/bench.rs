//! Benchmark generation, energy residual and capacity search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embed::{find_embedding, metrics, EmbedderParams, Embedding, EmbeddingMetrics};
use crate::error::{Error, Result};
use crate::hwgraph::HardwareGraph;
use crate::ising::{CouplingGraph, IsingModel, QubitId};
use crate::sampler::split_seed;
use crate::skipper::select_cuts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearMode {
    /// All linear coefficients zero.
    Zero,
    /// One standard-normal draw per node.
    Normal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaParams {
    pub n: usize,
    /// Preferential attachment factor, 1..=6 for the standard families.
    pub m: usize,
    pub seed: u64,
    pub linear: LinearMode,
}

impl BaParams {
    pub fn check(&self) -> Result<()> {
        if self.m == 0 || self.m >= self.n {
            return Err(Error::Parameter(format!(
                "Barabasi-Albert needs 1 <= m < n, got m={} n={}",
                self.m, self.n
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::Parameter(format!("n={} exceeds the id range", self.n)));
        }
        Ok(())
    }
}

// stream ids for the seeded generators
const GRAPH_STREAM: u64 = 0;
const WEIGHT_STREAM: u64 = 1;

/// Barabasi-Albert graph grown from an `m`-clique. Each new node links to
/// `m` distinct existing nodes chosen with probability proportional to
/// degree (uniformly while every degree is zero).
pub fn ba_graph(p: &BaParams) -> Result<CouplingGraph> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    rng.set_stream(GRAPH_STREAM);

    let mut edges = Vec::with_capacity(p.m * (p.m - 1) / 2 + (p.n - p.m) * p.m);
    // each node appears once per incident edge
    let mut endpoints: Vec<QubitId> = Vec::new();
    for a in 0..p.m as QubitId {
        for b in a + 1..p.m as QubitId {
            edges.push((a, b));
            endpoints.push(a);
            endpoints.push(b);
        }
    }
    let mut chosen = Vec::with_capacity(p.m);
    for new in p.m as QubitId..p.n as QubitId {
        chosen.clear();
        while chosen.len() < p.m {
            let t = if endpoints.is_empty() {
                rng.random_range(0..new)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, new));
            endpoints.push(t);
            endpoints.push(new);
        }
    }
    let mut g = CouplingGraph::from_edges(edges);
    g.nodes = (0..p.n as QubitId).collect();
    Ok(g)
}

/// Standard-normal couplings on every edge; linear terms per `linear`.
pub fn to_ising(graph: &CouplingGraph, seed: u64, linear: LinearMode) -> Result<IsingModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(WEIGHT_STREAM);
    let mut model = IsingModel::new();
    for &q in &graph.nodes {
        model.add_variable(q);
    }
    for &(a, b) in &graph.edges {
        model.set_quadratic(a, b, rng.sample(StandardNormal))?;
    }
    if linear == LinearMode::Normal {
        for &q in &graph.nodes {
            model.set_linear(q, rng.sample(StandardNormal))?;
        }
    }
    Ok(model)
}

/// Seeded Barabasi-Albert Ising benchmark.
pub fn ba_model(p: &BaParams) -> Result<IsingModel> {
    to_ising(&ba_graph(p)?, p.seed, p.linear)
}

/// BA-`m` family indexed by size. Sizes `n <= m` give the `n`-clique that
/// seeds the growth process.
pub fn ba_family(m: usize, seed: u64, linear: LinearMode) -> impl Fn(usize) -> Result<IsingModel> {
    move |n| {
        if n <= m {
            let g = CouplingGraph::from_edges(
                (0..n as QubitId).flat_map(|a| (a + 1..n as QubitId).map(move |b| (a, b))),
            );
            let g = CouplingGraph {
                nodes: (0..n as QubitId).collect(),
                ..g
            };
            to_ising(&g, seed, linear)
        } else {
            ba_model(&BaParams { n, m, seed, linear })
        }
    }
}

/// `|e_min - e_global|`.
pub fn energy_residual(e_min: f64, e_global: f64) -> f64 {
    (e_min - e_global).abs()
}

/// Outcome of one capacity probe.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub n: usize,
    pub embedding: Option<Embedding>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Largest size that embedded.
    pub capacity: usize,
    /// `capacity + 1`, which failed or cannot fit on the device.
    pub failed_at: usize,
    /// Embedding of the reduced graph at `capacity`.
    pub witness: Option<Embedding>,
    pub metrics: Option<EmbeddingMetrics>,
    pub probes: Vec<(usize, bool)>,
}

/// Tries to embed `family(n)` after removing its `c` highest-degree qubits.
pub fn probe(
    model: &IsingModel,
    hw: &HardwareGraph,
    c: usize,
    params: &EmbedderParams,
) -> Result<Option<Embedding>> {
    let plan = select_cuts(model, c.min(model.num_variables()))?;
    let mut reduced = model.coupling_graph();
    reduced.nodes.retain(|q| !plan.qubits.contains(q));
    reduced
        .edges
        .retain(|(a, b)| !plan.qubits.contains(a) && !plan.qubits.contains(b));
    match find_embedding(&reduced, hw, params) {
        Ok(e) => Ok(Some(e)),
        Err(e) if e.is_embedding_failure() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Largest `n` whose `c`-cut reduced graph embeds into `hw`, found by
/// doubling then bisection. The result embeds and `n + 1` does not; sizes
/// above `N + c` are never probed since they cannot fit.
pub fn capacity_search<F>(
    family: F,
    hw: &HardwareGraph,
    c: usize,
    params: &EmbedderParams,
) -> Result<CapacityResult>
where
    F: Fn(usize) -> Result<IsingModel>,
{
    if c > crate::skipper::MAX_CUTS {
        return Err(Error::CutsOutOfRange {
            c,
            max: crate::skipper::MAX_CUTS,
        });
    }
    let ceiling = hw.num_nodes() + c;
    let mut probes = Vec::new();
    let mut try_n = |n: usize| -> Result<Option<Embedding>> {
        let p = params.with_seed(split_seed(params.seed, n as u64));
        let r = probe(&family(n)?, hw, c, &p)?;
        probes.push((n, r.is_some()));
        Ok(r)
    };

    let mut lo = 0usize;
    let mut lo_embedding: Option<Embedding> = None;
    let mut n = 1usize;
    let mut hi = loop {
        let n_try = n.min(ceiling);
        match try_n(n_try)? {
            Some(e) => {
                lo = n_try;
                lo_embedding = Some(e);
                if n_try == ceiling {
                    // more reduced-graph nodes than hardware qubits
                    break ceiling + 1;
                }
                n *= 2;
            }
            None => break n_try,
        }
    };
    if hi <= ceiling {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match try_n(mid)? {
                Some(e) => {
                    lo = mid;
                    lo_embedding = Some(e);
                }
                None => hi = mid,
            }
        }
    }
    let metrics = lo_embedding.as_ref().map(|e| metrics(e, hw));
    Ok(CapacityResult {
        capacity: lo,
        failed_at: hi,
        witness: lo_embedding,
        metrics,
        probes,
    })
}
