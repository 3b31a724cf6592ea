//! Hardware connectivity graphs.
//!
//! Chimera node ids are laid out row-major over unit cells, then by shore,
//! then by index within the shore:
//!
//! ```text
//! id(row, col, shore, k) = ((row * n + col) * 2 + shore) * t + k
//! ```
//!
//! Shore 0 qubits couple vertically to the same `k` in the cell below,
//! shore 1 qubits couple horizontally to the same `k` in the cell to the
//! right. Inside a cell every shore-0 qubit couples to every shore-1 qubit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::QubitId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Chimera { m: u32, n: u32, t: u32 },
    Grid { rows: u32, cols: u32 },
    Complete { n: u32 },
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardwareGraph {
    topology: Topology,
    adj: BTreeMap<QubitId, BTreeSet<QubitId>>,
}

impl HardwareGraph {
    fn with_nodes(topology: Topology, count: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        if count > u64::from(u32::MAX) {
            return Err(Error::InvalidGraph(format!("{count} nodes exceeds the id range")));
        }
        Ok(HardwareGraph {
            topology,
            adj: (0..count as u32).map(|q| (q, BTreeSet::new())).collect(),
        })
    }

    fn link(&mut self, a: QubitId, b: QubitId) {
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    /// Chimera `C(m, n, t)`: an `m x n` grid of `K(t, t)` unit cells.
    pub fn chimera(m: u32, n: u32, t: u32) -> Result<Self> {
        if m == 0 || n == 0 || t == 0 {
            return Err(Error::InvalidGraph("chimera dimensions must be positive".into()));
        }
        let count = 2 * u64::from(m) * u64::from(n) * u64::from(t);
        let mut g = Self::with_nodes(Topology::Chimera { m, n, t }, count)?;
        let id = |r: u32, c: u32, shore: u32, k: u32| ((r * n + c) * 2 + shore) * t + k;
        for r in 0..m {
            for c in 0..n {
                for a in 0..t {
                    for b in 0..t {
                        g.link(id(r, c, 0, a), id(r, c, 1, b));
                    }
                    if r + 1 < m {
                        g.link(id(r, c, 0, a), id(r + 1, c, 0, a));
                    }
                    if c + 1 < n {
                        g.link(id(r, c, 1, a), id(r, c + 1, 1, a));
                    }
                }
            }
        }
        Ok(g)
    }

    /// `rows x cols` nearest-neighbour lattice, id `r * cols + c`.
    pub fn grid(rows: u32, cols: u32) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGraph("grid dimensions must be positive".into()));
        }
        let mut g = Self::with_nodes(Topology::Grid { rows, cols }, u64::from(rows) * u64::from(cols))?;
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    g.link(q, q + 1);
                }
                if r + 1 < rows {
                    g.link(q, q + cols);
                }
            }
        }
        Ok(g)
    }

    pub fn complete(n: u32) -> Result<Self> {
        let mut g = Self::with_nodes(Topology::Complete { n }, u64::from(n))?;
        for a in 0..n {
            for b in a + 1..n {
                g.link(a, b);
            }
        }
        Ok(g)
    }

    /// Builds a graph from edges given in either or both directions.
    pub fn from_edge_list(edges: &[(QubitId, QubitId)]) -> Result<Self> {
        let mut g = HardwareGraph {
            topology: Topology::Custom,
            adj: BTreeMap::new(),
        };
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on qubit {a}")));
            }
            g.link(a, b);
        }
        if g.adj.is_empty() {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        Ok(g)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.adj.contains_key(&q)
    }

    pub fn neighbors(&self, q: QubitId) -> impl Iterator<Item = QubitId> + '_ {
        self.adj.get(&q).into_iter().flatten().copied()
    }

    pub fn degree(&self, q: QubitId) -> usize {
        self.adj.get(&q).map_or(0, BTreeSet::len)
    }

    pub fn has_edge(&self, a: QubitId, b: QubitId) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (QubitId, QubitId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, nb)| nb.range(a + 1..).map(move |&b| (a, b)))
    }

    pub fn to_spec(&self) -> HardwareSpec {
        match self.topology {
            Topology::Chimera { m, n, t } => HardwareSpec::Chimera { m, n, t },
            Topology::Grid { rows, cols } => HardwareSpec::Grid { rows, cols },
            Topology::Complete { n } => HardwareSpec::Complete { n },
            Topology::Custom => HardwareSpec::Edges {
                edges: self.edges().collect(),
            },
        }
    }
}

/// Serializable description of a hardware graph:
/// `{"topology":"chimera","m":..,"n":..,"t":..}` or an explicit edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "lowercase", deny_unknown_fields)]
pub enum HardwareSpec {
    Chimera { m: u32, n: u32, t: u32 },
    Grid { rows: u32, cols: u32 },
    Complete { n: u32 },
    Edges { edges: Vec<(QubitId, QubitId)> },
}

impl HardwareSpec {
    pub fn build(&self) -> Result<HardwareGraph> {
        match self {
            HardwareSpec::Chimera { m, n, t } => HardwareGraph::chimera(*m, *n, *t),
            HardwareSpec::Grid { rows, cols } => HardwareGraph::grid(*rows, *cols),
            HardwareSpec::Complete { n } => HardwareGraph::complete(*n),
            HardwareSpec::Edges { edges } => HardwareGraph::from_edge_list(edges),
        }
    }
}

impl fmt::Display for HardwareSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardwareSpec::Chimera { m, n, t } => write!(f, "chimera:{m},{n},{t}"),
            HardwareSpec::Grid { rows, cols } => write!(f, "grid:{rows},{cols}"),
            HardwareSpec::Complete { n } => write!(f, "complete:{n}"),
            HardwareSpec::Edges { edges } => write!(f, "edges:{}", edges.len()),
        }
    }
}

/// Parses the short command-line form: `chimera:m,n,t`, `grid:r,c` or
/// `complete:n`.
impl FromStr for HardwareSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("hardware spec {s:?} must look like kind:args")))?;
        let nums = args
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parameter(format!("hardware spec {s:?}: {e}")))?;
        match (kind, nums.as_slice()) {
            ("chimera", &[m, n, t]) => Ok(HardwareSpec::Chimera { m, n, t }),
            ("grid", &[rows, cols]) => Ok(HardwareSpec::Grid { rows, cols }),
            ("complete", &[n]) => Ok(HardwareSpec::Complete { n }),
            _ => Err(Error::Parameter(format!("unrecognised hardware spec {s:?}"))),
        }
    }
}
