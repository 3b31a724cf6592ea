//! Breadth-first chain skipping.
//!
//! The `c` highest-degree program qubits are fixed simultaneously to every
//! `±1` pattern, giving `2^c` independent sub-problems that share one
//! embedding of the reduced coupling graph. Each sub-problem is executed,
//! unembedded and decoded back onto the original variables, and the lowest
//! energy sample wins. When the model has no linear terms, a pattern and
//! its global spin flip have identical spectra, so only patterns with the
//! first cut qubit at `+1` are executed and each result is also evaluated
//! flipped.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMetrics;
use crate::error::{Error, Result};
use crate::ising::{Assignment, IsingModel, QubitId, Sample, SampleSet, Spin};
use crate::pipeline::{execute, SharedEmbedding, Target};
use crate::sampler::{split_seed, Sampler};
use crate::unembed::UnembedSummary;

/// Upper bound on the number of cut qubits.
pub const MAX_CUTS: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPlan {
    pub qubits: Vec<QubitId>,
    pub symmetry_halved: bool,
}

impl CutPlan {
    pub fn cuts(&self) -> usize {
        self.qubits.len()
    }

    /// Number of sub-problems the plan executes.
    pub fn num_subproblems(&self) -> usize {
        let full = 1usize << self.qubits.len();
        if self.symmetry_halved {
            full / 2
        } else {
            full
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubProblem {
    /// Bit `k` set means cut qubit `k` is fixed to `+1`.
    pub index: usize,
    pub fixing: Assignment,
    pub model: IsingModel,
}

/// The first `c` qubits of the degree order.
pub fn select_cuts(model: &IsingModel, c: usize) -> Result<CutPlan> {
    let max = MAX_CUTS.min(model.num_variables());
    if c > max {
        return Err(Error::CutsOutOfRange { c, max });
    }
    Ok(CutPlan {
        qubits: model.degree_order().into_iter().take(c).collect(),
        symmetry_halved: c > 0 && model.has_zero_linear(),
    })
}

pub fn fixing_for_index(plan: &CutPlan, index: usize) -> Assignment {
    plan.qubits
        .iter()
        .enumerate()
        .map(|(k, &q)| (q, Spin::from_bit(index >> k & 1 == 1)))
        .collect()
}

/// All fixings of the cut qubits in binary order (halved under symmetry).
pub fn build_subproblems(model: &IsingModel, plan: &CutPlan) -> Result<Vec<SubProblem>> {
    if plan.cuts() > MAX_CUTS {
        return Err(Error::CutsOutOfRange {
            c: plan.cuts(),
            max: MAX_CUTS,
        });
    }
    (0..1usize << plan.cuts())
        .filter(|&i| !plan.symmetry_halved || i & 1 == 1)
        .map(|index| {
            let fixing = fixing_for_index(plan, index);
            let model = model.fix_qubits(&fixing)?;
            Ok(SubProblem { index, fixing, model })
        })
        .collect()
}

/// Reinserts the fixed qubits and scores the sample on the original model.
pub fn decode(sample: &Sample, fixing: &Assignment, original: &IsingModel) -> Result<Sample> {
    let assignment = sample.assignment.union(fixing)?;
    let energy = original.energy(&assignment)?;
    Ok(Sample {
        assignment,
        energy,
        occurrences: sample.occurrences,
    })
}

/// Lower energy wins; equal energies go to the lexicographically smaller
/// assignment, so the choice is independent of evaluation order.
pub(crate) fn better(a: &Sample, b: &Sample) -> bool {
    a.energy < b.energy || (a.energy == b.energy && a.assignment < b.assignment)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubProblemRecord {
    pub index: usize,
    pub fixing: Assignment,
    /// Index of the spin-flipped twin that was evaluated by symmetry.
    pub twin_index: Option<usize>,
    pub num_variables: usize,
    pub num_reads: u64,
    pub distinct_samples: usize,
    /// Best decoded energy on the original model.
    pub best_energy: f64,
    pub mean_energy: f64,
    pub unembed: Option<UnembedSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipperResult {
    pub plan: CutPlan,
    pub best: Sample,
    pub subproblems: Vec<SubProblemRecord>,
    pub embedding: Option<SharedEmbedding>,
    pub n_qmi: usize,
    pub n_embeddings: usize,
}

impl SkipperResult {
    pub fn metrics(&self) -> Option<&EmbeddingMetrics> {
        self.embedding.as_ref().map(|e| &e.metrics)
    }
}

/// Decodes a sub-problem's sample set onto the original variables.
pub(crate) fn decode_set(set: &SampleSet, fixing: &Assignment, original: &IsingModel) -> Result<Vec<Sample>> {
    set.samples.iter().map(|s| decode(s, fixing, original)).collect()
}

/// Runs the full binary tree of `cuts` fixings.
pub fn run(
    model: &IsingModel,
    cuts: usize,
    sampler: &dyn Sampler,
    target: &Target,
    seed: u64,
) -> Result<SkipperResult> {
    run_with_plan(model, select_cuts(model, cuts)?, sampler, target, seed)
}

/// Runs an explicit plan, e.g. the full tree on a model that would
/// otherwise be halved.
pub fn run_with_plan(
    model: &IsingModel,
    plan: CutPlan,
    sampler: &dyn Sampler,
    target: &Target,
    seed: u64,
) -> Result<SkipperResult> {
    for (k, &q) in plan.qubits.iter().enumerate() {
        if !model.contains(q) {
            return Err(Error::UnknownQubit(q));
        }
        if plan.qubits[..k].contains(&q) {
            return Err(Error::Parameter(format!("qubit {q} cut twice")));
        }
    }
    if plan.symmetry_halved && (plan.qubits.is_empty() || !model.has_zero_linear()) {
        return Err(Error::Parameter(
            "symmetry halving needs at least one cut and no linear terms".into(),
        ));
    }
    let subs = build_subproblems(model, &plan)?;
    let full_mask = (1usize << plan.cuts()) - 1;

    let shared = match target {
        Target::Logical => None,
        Target::Hardware(hw) => Some(hw.embed(&subs[0].model, split_seed(seed, 0))?),
    };
    let embedding = shared.as_ref().map(|s| &s.embedding);

    let outcomes: Vec<Result<(SubProblemRecord, Sample)>> = subs
        .par_iter()
        .map(|sub| {
            let wrap = |e: Error| Error::SubProblem {
                index: sub.index,
                source: Box::new(e),
            };
            let (set, summary) = execute(
                &sub.model,
                target,
                embedding,
                sampler,
                split_seed(seed, 1 + sub.index as u64),
            )
            .map_err(wrap)?;
            let mut decoded = decode_set(&set, &sub.fixing, model).map_err(wrap)?;
            if plan.symmetry_halved {
                let twin = sub.fixing.flipped();
                let flipped: Vec<Sample> = set
                    .samples
                    .iter()
                    .map(|s| {
                        let t = Sample {
                            assignment: s.assignment.flipped(),
                            ..s.clone()
                        };
                        decode(&t, &twin, model)
                    })
                    .collect::<Result<_>>()
                    .map_err(wrap)?;
                decoded.extend(flipped);
            }
            let best = decoded
                .iter()
                .fold(None::<&Sample>, |acc, s| match acc {
                    Some(b) if !better(s, b) => Some(b),
                    _ => Some(s),
                })
                .cloned()
                .ok_or_else(|| wrap(Error::Parameter("sampler returned no samples".into())))?;
            let record = SubProblemRecord {
                index: sub.index,
                fixing: sub.fixing.clone(),
                twin_index: plan.symmetry_halved.then_some(sub.index ^ full_mask),
                num_variables: sub.model.num_variables(),
                num_reads: set.num_reads,
                distinct_samples: set.samples.len(),
                best_energy: best.energy,
                mean_energy: set.mean_energy().unwrap_or(f64::NAN),
                unembed: summary,
            };
            Ok((record, best))
        })
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut best: Option<Sample> = None;
    for o in outcomes {
        let (record, sample) = o?;
        if best.as_ref().is_none_or(|b| better(&sample, b)) {
            best = Some(sample);
        }
        records.push(record);
    }
    Ok(SkipperResult {
        n_qmi: records.len(),
        n_embeddings: usize::from(shared.is_some()),
        plan,
        best: best.expect("at least one sub-problem"),
        subproblems: records,
        embedding: shared,
    })
}
