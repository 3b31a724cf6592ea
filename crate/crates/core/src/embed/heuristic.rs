//! Iterative chain placement in the style of Cai, Macready and Roy.
//!
//! Each program qubit is placed by running a multi-source Dijkstra search
//! from every already-placed neighbour's chain over the hardware graph,
//! where entering a physical qubit costs `OVERUSE_BASE^usage`. The root
//! minimising the summed distances is joined to each neighbour chain by its
//! shortest path, and leaves that carry no required coupler are pruned.
//! Chains may overlap while the search runs; improvement sweeps rip up and
//! re-route one qubit at a time until the overlap disappears and the total
//! chain length stops shrinking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_valid, Embedding};
use crate::error::{Error, Result};
use crate::hwgraph::HardwareGraph;
use crate::ising::{CouplingGraph, QubitId};

/// Cost multiplier per additional chain sharing a physical qubit.
pub const OVERUSE_BASE: f64 = 8.0;

/// Extra re-routing passes per sweep over chains that still overlap.
pub const ROUTING_PASSES: usize = 3;

/// Congestion history added per sweep to every qubit that is still shared.
pub const HISTORY_STEP: f64 = 16.0;

const MAX_EXPONENT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedderParams {
    /// Wall-clock budget in seconds.
    pub timeout: f64,
    /// Sweeps without improvement before a try gives up.
    pub max_no_improvement: usize,
    /// Independent restarts.
    pub tries: usize,
    pub seed: u64,
}

impl Default for EmbedderParams {
    fn default() -> Self {
        EmbedderParams {
            timeout: 10.0,
            max_no_improvement: 5,
            tries: 5,
            seed: 0,
        }
    }
}

impl EmbedderParams {
    /// Hardware-scale budget: 1000 s, 20 stalled sweeps, 20 tries.
    pub fn hardware_scale(seed: u64) -> Self {
        EmbedderParams {
            timeout: 1000.0,
            max_no_improvement: 20,
            tries: 20,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        EmbedderParams { seed, ..self.clone() }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.timeout > 0.0) || self.max_no_improvement == 0 || self.tries == 0 {
            return Err(Error::Parameter(
                "embedder timeout, max_no_improvement and tries must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    overuse: usize,
    total_len: usize,
}

struct Router<'a> {
    hw_adj: &'a [Vec<usize>],
    src_adj: &'a [Vec<usize>],
    chains: Vec<Vec<usize>>,
    usage: Vec<u32>,
    history: Vec<f64>,
    weight: Vec<f64>,
    // scratch, one row per placed neighbour
    dist: Vec<Vec<f64>>,
    parent: Vec<Vec<usize>>,
    mark: Vec<u32>,
    stamp: u32,
}

impl<'a> Router<'a> {
    fn new(hw_adj: &'a [Vec<usize>], src_adj: &'a [Vec<usize>]) -> Self {
        let n_hw = hw_adj.len();
        Router {
            hw_adj,
            src_adj,
            chains: vec![Vec::new(); src_adj.len()],
            usage: vec![0; n_hw],
            history: vec![0.0; n_hw],
            weight: vec![1.0; n_hw],
            dist: Vec::new(),
            parent: Vec::new(),
            mark: vec![0; n_hw],
            stamp: 0,
        }
    }

    fn reset(&mut self) {
        for c in &mut self.chains {
            c.clear();
        }
        self.usage.iter_mut().for_each(|u| *u = 0);
        self.history.iter_mut().for_each(|h| *h = 0.0);
        self.weight.iter_mut().for_each(|w| *w = 1.0);
    }

    fn set_usage(&mut self, g: usize, u: u32) {
        self.usage[g] = u;
        self.weight[g] = (1.0 + self.history[g]) * OVERUSE_BASE.powi(u.min(MAX_EXPONENT) as i32);
    }

    fn record_congestion(&mut self) {
        for g in 0..self.usage.len() {
            if self.usage[g] > 1 {
                self.history[g] += HISTORY_STEP;
                self.set_usage(g, self.usage[g]);
            }
        }
    }

    fn rip_up(&mut self, v: usize) {
        let chain = std::mem::take(&mut self.chains[v]);
        for &g in &chain {
            self.set_usage(g, self.usage[g] - 1);
        }
    }

    fn commit(&mut self, v: usize, chain: Vec<usize>) {
        for &g in &chain {
            self.set_usage(g, self.usage[g] + 1);
        }
        self.chains[v] = chain;
    }

    fn ensure_scratch(&mut self, k: usize) {
        let n_hw = self.hw_adj.len();
        while self.dist.len() < k {
            self.dist.push(vec![f64::INFINITY; n_hw]);
            self.parent.push(vec![usize::MAX; n_hw]);
        }
    }

    /// Multi-source Dijkstra from `chains[u]` into scratch row `row`.
    fn search(&mut self, u: usize, row: usize) {
        let dist = &mut self.dist[row];
        let parent = &mut self.parent[row];
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        let mut heap = BinaryHeap::new();
        for &s in &self.chains[u] {
            dist[s] = 0.0;
            parent[s] = s;
            heap.push(HeapItem { cost: 0.0, node: s });
        }
        while let Some(HeapItem { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &y in &self.hw_adj[node] {
                let nd = cost + self.weight[y];
                if nd < dist[y] {
                    dist[y] = nd;
                    parent[y] = node;
                    heap.push(HeapItem { cost: nd, node: y });
                }
            }
        }
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        self.stamp
    }

    fn place(&mut self, v: usize, rng: &mut ChaCha8Rng) {
        self.rip_up(v);
        let placed: Vec<usize> = self.src_adj[v]
            .iter()
            .copied()
            .filter(|&u| !self.chains[u].is_empty())
            .collect();
        let n_hw = self.hw_adj.len();

        if placed.is_empty() {
            let g = self.pick_least_used(rng);
            self.commit(v, vec![g]);
            return;
        }

        self.ensure_scratch(placed.len());
        for (row, &u) in placed.iter().enumerate() {
            self.search(u, row);
        }

        let mut best = f64::INFINITY;
        let mut candidates = Vec::new();
        for g in 0..n_hw {
            let w = self.weight[g];
            let mut cost = w;
            for row in 0..placed.len() {
                let d = self.dist[row][g];
                if self.parent[row][g] != g {
                    cost += d - w;
                }
            }
            if !cost.is_finite() {
                continue;
            }
            match cost.partial_cmp(&best) {
                Some(Ordering::Less) => {
                    best = cost;
                    candidates.clear();
                    candidates.push(g);
                }
                Some(Ordering::Equal) => candidates.push(g),
                _ => {}
            }
        }
        if candidates.is_empty() {
            // neighbours unreachable (disconnected device)
            let g = self.pick_least_used(rng);
            self.commit(v, vec![g]);
            return;
        }
        let root = candidates[rng.random_range(0..candidates.len())];

        let stamp = self.next_stamp();
        let mut chain = vec![root];
        self.mark[root] = stamp;
        for row in 0..placed.len() {
            let parent = &self.parent[row];
            let mut x = root;
            while parent[x] != x {
                x = parent[x];
                if parent[x] != x && self.mark[x] != stamp {
                    self.mark[x] = stamp;
                    chain.push(x);
                }
            }
        }
        let chain = self.prune(chain, &placed);
        self.commit(v, chain);
    }

    fn pick_least_used(&self, rng: &mut ChaCha8Rng) -> usize {
        let min = *self.usage.iter().min().expect("non-empty hardware");
        let free: Vec<usize> = (0..self.usage.len()).filter(|&g| self.usage[g] == min).collect();
        free[rng.random_range(0..free.len())]
    }

    /// Drops leaf qubits whose removal keeps a coupler to every placed
    /// neighbour chain.
    fn prune(&self, mut chain: Vec<usize>, placed: &[usize]) -> Vec<usize> {
        let touches = |x: usize, k: usize| {
            let target = &self.chains[placed[k]];
            self.hw_adj[x].iter().any(|y| target.contains(y))
        };
        loop {
            if chain.len() <= 1 {
                return chain;
            }
            let counts: Vec<usize> = (0..placed.len())
                .map(|k| chain.iter().filter(|&&x| touches(x, k)).count())
                .collect();
            let removable = chain.iter().position(|&x| {
                let inner = self.hw_adj[x].iter().filter(|y| chain.contains(y)).count();
                inner <= 1 && (0..placed.len()).all(|k| !touches(x, k) || counts[k] >= 2)
            });
            match removable {
                Some(i) => {
                    chain.remove(i);
                }
                None => return chain,
            }
        }
    }

    fn score(&self) -> Score {
        Score {
            overuse: self.usage.iter().map(|&u| u.saturating_sub(1) as usize).sum(),
            total_len: self.chains.iter().map(Vec::len).sum(),
        }
    }

    fn overlapping(&self) -> Vec<usize> {
        (0..self.chains.len())
            .filter(|&v| self.chains[v].iter().any(|&g| self.usage[g] > 1))
            .collect()
    }

    fn clean_count(&self) -> usize {
        self.chains.len() - self.overlapping().len()
    }
}

/// Finds a minor embedding of `source` into `hw`.
///
/// Deterministic for a given `(source, hw, params)` unless the wall-clock
/// timeout is reached. Failure is reported as
/// [`Error::EmbeddingFailed`] or [`Error::EmbeddingTimeout`].
pub fn find_embedding(source: &CouplingGraph, hw: &HardwareGraph, params: &EmbedderParams) -> Result<Embedding> {
    params.check()?;
    let n = source.num_nodes();
    if n == 0 {
        return Ok(Embedding::new());
    }
    if n > hw.num_nodes() {
        return Err(Error::EmbeddingFailed {
            attempts: 0,
            best_placed: 0,
            total: n,
        });
    }

    let hw_ids: Vec<QubitId> = hw.nodes().collect();
    let hw_index: BTreeMap<QubitId, usize> = hw_ids.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let hw_adj: Vec<Vec<usize>> = hw_ids
        .iter()
        .map(|&q| hw.neighbors(q).map(|x| hw_index[&x]).collect())
        .collect();
    let src_index: BTreeMap<QubitId, usize> = source.nodes.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut src_adj = vec![Vec::new(); n];
    for &(a, b) in &source.edges {
        let (i, j) = (src_index[&a], src_index[&b]);
        if i != j && !src_adj[i].contains(&j) {
            src_adj[i].push(j);
            src_adj[j].push(i);
        }
    }

    let start = Instant::now();
    let budget = Duration::from_secs_f64(params.timeout);
    let mut router = Router::new(&hw_adj, &src_adj);
    let mut best_placed = 0;

    for attempt in 0..params.tries {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(attempt as u64);
        router.reset();

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for &v in &order {
            router.place(v, &mut rng);
        }

        let mut best = router.score();
        let mut best_valid = (best.overuse == 0).then(|| router.chains.clone());
        let mut stall = 0;
        let mut timed_out = false;
        while stall < params.max_no_improvement {
            if start.elapsed() > budget {
                timed_out = true;
                break;
            }
            order.shuffle(&mut rng);
            for &v in &order {
                router.place(v, &mut rng);
            }
            for _ in 0..ROUTING_PASSES {
                let bad = router.overlapping();
                if bad.is_empty() {
                    break;
                }
                for v in bad {
                    router.place(v, &mut rng);
                }
            }
            router.record_congestion();
            let s = router.score();
            if s < best {
                best = s;
                stall = 0;
                if s.overuse == 0 {
                    best_valid = Some(router.chains.clone());
                }
            } else {
                stall += 1;
            }
        }
        best_placed = best_placed.max(router.clean_count());

        if let Some(chains) = best_valid {
            let e = Embedding::from_chains(
                chains
                    .into_iter()
                    .enumerate()
                    .map(|(v, c)| (source.nodes[v], c.into_iter().map(|g| hw_ids[g]))),
            );
            if is_valid(&e, source, hw) {
                return Ok(e);
            }
        }
        if timed_out {
            return Err(Error::EmbeddingTimeout(start.elapsed().as_secs_f64()));
        }
    }
    Err(Error::EmbeddingFailed {
        attempts: params.tries,
        best_placed,
        total: n,
    })
}
