//! Mapping a logical model through an embedding onto hardware qubits.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::embed::{ensure_valid, Embedding};
use crate::error::{Error, Result};
use crate::hwgraph::HardwareGraph;
use crate::ising::{IsingModel, QubitId};

/// How the ferromagnetic intra-chain coupling magnitude is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum ChainStrength {
    /// Use the value as the coupling magnitude directly.
    Fixed(f64),
    /// Multiply the largest absolute logical coefficient by the value.
    Scaled(f64),
}

impl Default for ChainStrength {
    fn default() -> Self {
        ChainStrength::Scaled(2.0)
    }
}

impl ChainStrength {
    /// Coupling magnitude `S` for `model`. A scaled policy on a model with
    /// no non-zero coefficient falls back to the scale factor itself.
    pub fn magnitude(&self, model: &IsingModel) -> Result<f64> {
        let s = match *self {
            ChainStrength::Fixed(v) => v,
            ChainStrength::Scaled(alpha) => {
                let max = model.max_abs_coefficient();
                if max > 0.0 {
                    alpha * max
                } else {
                    alpha
                }
            }
        };
        let raw = match *self {
            ChainStrength::Fixed(v) | ChainStrength::Scaled(v) => v,
        };
        if !(raw > 0.0) || !s.is_finite() {
            return Err(Error::Parameter(format!("chain strength must be positive, got {raw}")));
        }
        Ok(s)
    }
}

/// Builds the hardware-level model for `model` under embedding `e`.
///
/// Linear terms are split evenly over each chain, couplings evenly over
/// every hardware coupler joining the two chains, and every coupler inside
/// a chain receives `-S`. The offset gains `S` per intra-chain coupler, so
/// any assignment with uniform chains has exactly its logical energy.
pub fn embed_model(
    model: &IsingModel,
    e: &Embedding,
    hw: &HardwareGraph,
    strength: ChainStrength,
) -> Result<IsingModel> {
    ensure_valid(e, &model.coupling_graph(), hw)?;
    let s = strength.magnitude(model)?;

    let mut out = IsingModel::new();
    out.set_offset(model.offset());
    for q in model.variables() {
        let chain = &e.chains[&q];
        for &p in chain {
            out.add_variable(p);
        }
        let hq = model.linear(q);
        if hq != 0.0 {
            let share = hq / chain.len() as f64;
            for &p in chain {
                out.set_linear(p, share)?;
            }
        }
        let mut intra = 0usize;
        for &p in chain {
            for x in hw.neighbors(p) {
                if x > p && chain.contains(&x) {
                    out.set_quadratic(p, x, -s)?;
                    intra += 1;
                }
            }
        }
        out.set_offset(out.offset() + s * intra as f64);
    }

    for (a, b, v) in model.quadratic_terms() {
        let couplers = couplers_between(&e.chains[&a], &e.chains[&b], hw);
        if couplers.is_empty() {
            return Err(Error::ZeroCoupler(a, b));
        }
        let share = v / couplers.len() as f64;
        for (p, x) in couplers {
            out.add_quadratic(p, x, share)?;
        }
    }
    Ok(out)
}

fn couplers_between(
    ca: &BTreeSet<QubitId>,
    cb: &BTreeSet<QubitId>,
    hw: &HardwareGraph,
) -> Vec<(QubitId, QubitId)> {
    let mut out = Vec::new();
    for &p in ca {
        for x in hw.neighbors(p) {
            if cb.contains(&x) {
                out.push((p, x));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{Assignment, Spin};

    #[test]
    fn identity_embedding_preserves_model() {
        let hw = HardwareGraph::grid(1, 2).unwrap();
        let m = IsingModel::from_terms([(0, 0.5)], [(0, 1, -1.5)]).unwrap();
        let e = Embedding::from_chains([(0, [0]), (1, [1])]);
        let phys = embed_model(&m, &e, &hw, ChainStrength::default()).unwrap();
        assert_eq!(phys, m);
    }

    #[test]
    fn split_field_and_penalty() {
        let hw = HardwareGraph::grid(1, 2).unwrap();
        let m = IsingModel::from_terms([(0, 1.0)], []).unwrap();
        let e = Embedding::from_chains([(0, [0, 1])]);
        let phys = embed_model(&m, &e, &hw, ChainStrength::Fixed(2.0)).unwrap();
        assert_eq!(phys.linear(0), 0.5);
        assert_eq!(phys.linear(1), 0.5);
        assert_eq!(phys.quadratic(0, 1), -2.0);
        assert_eq!(phys.offset(), 2.0);
        for (spin, want) in [(Spin::Up, 1.0), (Spin::Down, -1.0)] {
            let a: Assignment = [(0, spin), (1, spin)].into_iter().collect();
            assert_eq!(phys.energy(&a).unwrap(), want);
        }
    }

    #[test]
    fn coupling_split_over_all_couplers() {
        // chains {0,1} and {2,3} on a 2x2 grid: couplers 0-2 and 1-3
        let hw = HardwareGraph::grid(2, 2).unwrap();
        let m = IsingModel::from_terms([], [(7, 9, 3.0)]).unwrap();
        let e = Embedding::from_chains([(7, [0, 1]), (9, [2, 3])]);
        let phys = embed_model(&m, &e, &hw, ChainStrength::Scaled(2.0)).unwrap();
        assert_eq!(phys.quadratic(0, 2), 1.5);
        assert_eq!(phys.quadratic(1, 3), 1.5);
        assert_eq!(phys.quadratic(0, 1), -6.0);
        assert_eq!(phys.quadratic(2, 3), -6.0);
        assert_eq!(phys.offset(), 12.0);
    }

    #[test]
    fn invalid_embedding_rejected() {
        let hw = HardwareGraph::grid(1, 3).unwrap();
        let m = IsingModel::from_terms([], [(0, 1, 1.0)]).unwrap();
        let e = Embedding::from_chains([(0, [0]), (1, [2])]);
        assert!(matches!(
            embed_model(&m, &e, &hw, ChainStrength::default()),
            Err(Error::InvalidEmbedding(_))
        ));
    }

    #[test]
    fn strength_policies() {
        let m = IsingModel::from_terms([(0, -3.0)], [(0, 1, 1.0)]).unwrap();
        assert_eq!(ChainStrength::Scaled(2.0).magnitude(&m).unwrap(), 6.0);
        assert_eq!(ChainStrength::Fixed(1.5).magnitude(&m).unwrap(), 1.5);
        assert!(ChainStrength::Fixed(0.0).magnitude(&m).is_err());
        assert_eq!(ChainStrength::Scaled(2.0).magnitude(&IsingModel::new()).unwrap(), 2.0);
    }
}
