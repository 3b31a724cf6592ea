//! Greedy depth-first chain skipping.
//!
//! Starting from the uncut problem (node 1), each level cuts the
//! highest-degree qubit of the current node's reduced model, evaluates both
//! children (`2x` fixes it to `-1`, `2x + 1` to `+1`) on one shared
//! embedding, and descends into the child with the lower node feature
//! `f(Z) = |1 / (E_min * EV)|`. The answer is the lowest decoded energy
//! seen at any evaluated node, root included.

use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMetrics;
use crate::error::{Error, Result};
use crate::ising::{Assignment, IsingModel, QubitId, Sample, SampleSet, Spin};
use crate::pipeline::{execute, Target};
use crate::sampler::{split_seed, Sampler};
use crate::skipper::{better, decode_set, MAX_CUTS};
use crate::unembed::UnembedSummary;

/// `|1 / (E_min * EV)|`, with `EV` the occurrence-weighted mean energy.
/// Lower is better. Returns `+inf` when the product is zero or the set is
/// empty, so such a node is never preferred.
pub fn node_feature(z: &SampleSet) -> f64 {
    match (z.min_energy(), z.mean_energy()) {
        (Some(e_min), Some(ev)) => {
            let prod = e_min * ev;
            if prod == 0.0 || !prod.is_finite() {
                f64::INFINITY
            } else {
                (1.0 / prod).abs()
            }
        }
        _ => f64::INFINITY,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub level: usize,
    /// Root is 1; the children of `x` are `2x` and `2x + 1`.
    pub index: u64,
    pub fixing: Assignment,
    pub num_variables: usize,
    /// Serialized as `null` when degenerate (`+inf`).
    pub feature: f64,
    pub degenerate_feature: bool,
    pub best_energy: f64,
    pub mean_energy: f64,
    pub num_reads: u64,
    pub metrics: Option<EmbeddingMetrics>,
    pub unembed: Option<UnembedSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipperGResult {
    pub best: Sample,
    /// Every evaluated node in evaluation order.
    pub nodes: Vec<TreeNode>,
    /// Indices of the nodes the search descended through, root first.
    pub path: Vec<u64>,
    /// Qubit cut at each level.
    pub cuts: Vec<QubitId>,
    pub n_qmi: usize,
    pub n_embeddings: usize,
    pub warnings: Vec<String>,
}

struct Evaluated {
    node: TreeNode,
    best: Sample,
    model: IsingModel,
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    original: &IsingModel,
    model: IsingModel,
    fixing: Assignment,
    level: usize,
    index: u64,
    target: &Target,
    embedding: Option<&crate::pipeline::SharedEmbedding>,
    sampler: &dyn Sampler,
    seed: u64,
) -> Result<Evaluated> {
    let wrap = |e: Error| Error::SubProblem {
        index: index as usize,
        source: Box::new(e),
    };
    let (set, summary) = execute(
        &model,
        target,
        embedding.map(|e| &e.embedding),
        sampler,
        split_seed(seed, index),
    )
    .map_err(wrap)?;
    let decoded = decode_set(&set, &fixing, original).map_err(wrap)?;
    let decoded_set = SampleSet {
        samples: decoded,
        num_reads: set.num_reads,
    };
    let best = decoded_set
        .samples
        .iter()
        .fold(None::<&Sample>, |acc, s| match acc {
            Some(b) if !better(s, b) => Some(b),
            _ => Some(s),
        })
        .cloned()
        .ok_or_else(|| wrap(Error::Parameter("sampler returned no samples".into())))?;
    let feature = node_feature(&decoded_set);
    Ok(Evaluated {
        node: TreeNode {
            level,
            index,
            num_variables: model.num_variables(),
            fixing,
            feature,
            degenerate_feature: feature.is_infinite(),
            best_energy: best.energy,
            mean_energy: decoded_set.mean_energy().unwrap_or(f64::NAN),
            num_reads: set.num_reads,
            metrics: embedding.map(|e| e.metrics.clone()),
            unembed: summary,
        },
        best,
        model,
    })
}

/// Runs `cuts` greedy levels. An embedding failure below the root stops
/// the descent and returns the best result so far with a warning.
pub fn run(
    model: &IsingModel,
    cuts: usize,
    sampler: &dyn Sampler,
    target: &Target,
    seed: u64,
) -> Result<SkipperGResult> {
    let max = MAX_CUTS.min(model.num_variables());
    if cuts > max {
        return Err(Error::CutsOutOfRange { c: cuts, max });
    }
    let embed = |m: &IsingModel, stream: u64| match target {
        Target::Logical => Ok(None),
        Target::Hardware(hw) => hw.embed(m, split_seed(seed, stream)).map(Some),
    };

    let root_embedding = embed(model, 0)?;
    let mut n_embeddings = usize::from(root_embedding.is_some());
    let root = evaluate(
        model,
        model.clone(),
        Assignment::new(),
        0,
        1,
        target,
        root_embedding.as_ref(),
        sampler,
        seed,
    )?;

    let mut best = root.best.clone();
    let mut path = vec![root.node.index];
    let mut nodes = vec![root.node.clone()];
    let mut cut_qubits = Vec::new();
    let mut warnings = Vec::new();
    let mut current = root;

    for level in 1..=cuts {
        let q = *current
            .model
            .degree_order()
            .first()
            .expect("cut count bounded by variable count");
        let children: Vec<(IsingModel, Assignment)> = [Spin::Down, Spin::Up]
            .into_iter()
            .map(|s| {
                let mut fixing = current.node.fixing.clone();
                fixing.insert(q, s);
                Ok((current.model.fix_qubit(q, s)?, fixing))
            })
            .collect::<Result<_>>()?;

        let shared = match embed(&children[0].0, level as u64) {
            Ok(e) => e,
            Err(e) if e.is_embedding_failure() => {
                warnings.push(format!("level {level}: {e}; stopping descent"));
                break;
            }
            Err(e) => return Err(e),
        };
        n_embeddings += usize::from(shared.is_some());
        cut_qubits.push(q);

        let x = current.node.index;
        let [(lm, lf), (rm, rf)]: [(IsingModel, Assignment); 2] =
            children.try_into().expect("two children");
        let (left, right) = rayon::join(
            || evaluate(model, lm, lf, level, 2 * x, target, shared.as_ref(), sampler, seed),
            || evaluate(model, rm, rf, level, 2 * x + 1, target, shared.as_ref(), sampler, seed),
        );
        let (left, right) = (left?, right?);
        for child in [&left, &right] {
            if better(&child.best, &best) {
                best = child.best.clone();
            }
            nodes.push(child.node.clone());
        }
        current = if right.node.feature < left.node.feature {
            right
        } else {
            left
        };
        path.push(current.node.index);
    }

    Ok(SkipperGResult {
        best,
        n_qmi: nodes.len(),
        nodes,
        path,
        cuts: cut_qubits,
        n_embeddings,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::brute_force_ground;
    use crate::sampler::ExactSampler;

    fn set_with(energies: &[(f64, u64)]) -> SampleSet {
        let samples = energies
            .iter()
            .enumerate()
            .map(|(i, &(energy, occurrences))| Sample {
                assignment: [(i as QubitId, Spin::Up)].into_iter().collect(),
                energy,
                occurrences,
            })
            .collect();
        SampleSet {
            samples,
            num_reads: energies.iter().map(|e| e.1).sum(),
        }
    }

    #[test]
    fn feature_arithmetic() {
        // E_min = -8, EV = -4
        assert_eq!(node_feature(&set_with(&[(-8.0, 1), (0.0, 1)])), 0.03125);
        // E_min = -10, EV = -5
        assert!((node_feature(&set_with(&[(-10.0, 1), (0.0, 1)])) - 0.02).abs() < 1e-15);
        // EV = 0
        assert_eq!(node_feature(&set_with(&[(-1.0, 1), (1.0, 1)])), f64::INFINITY);
        assert_eq!(node_feature(&SampleSet::default()), f64::INFINITY);
    }

    #[test]
    fn chain_model_counts_and_indices() {
        let mut m = IsingModel::new();
        for q in 0..12u32 {
            m.add_quadratic(q, (q + 1) % 12, if q % 2 == 0 { 1.0 } else { -0.7 }).unwrap();
            m.set_linear(q, 0.1 * f64::from(q) - 0.5).unwrap();
        }
        for c in [0, 1, 4, 11] {
            let r = run(&m, c, &ExactSampler::new(5), &Target::Logical, 3).unwrap();
            assert_eq!(r.n_qmi, 2 * c + 1);
            assert_eq!(r.path.len(), c + 1);
            assert_eq!(r.path[0], 1);
            for w in r.path.windows(2) {
                assert!(w[1] == 2 * w[0] || w[1] == 2 * w[0] + 1);
            }
            for node in &r.nodes {
                assert!(node.index >= 1 << node.level && node.index < 2 << node.level);
                assert_eq!(node.fixing.len(), node.level);
            }
            assert!(r.best.energy <= r.nodes[0].best_energy);
            assert_eq!(r.best.energy, brute_force_ground(&m).unwrap().1);
        }
    }

    #[test]
    fn too_many_cuts() {
        let m = IsingModel::from_terms([], [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            run(&m, 3, &ExactSampler::new(1), &Target::Logical, 0),
            Err(Error::CutsOutOfRange { c: 3, max: 2 })
        ));
    }
}
