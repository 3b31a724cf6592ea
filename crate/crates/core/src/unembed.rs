//! Hardware samples back to program-qubit samples.
//!
//! Each chain is resolved by majority vote. Even chains with a tied vote
//! are *balanced*; up to `balanced_limit` of them are completed by trying
//! every combination against the logical energy, beyond that they are
//! filled in at random. Single-qubit correction (greedy single-flip descent)
//! can be applied afterwards.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::ising::{Assignment, DenseIsing, IsingModel, QubitId, Sample, SampleSet, Spin};
use crate::sampler::split_seed;

/// Balanced chains completed exhaustively; `2^10 = 1024` combinations.
pub const DEFAULT_BALANCED_LIMIT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainResolution {
    pub program: QubitId,
    /// `None` when the vote is tied.
    pub value: Option<Spin>,
    pub broken: bool,
}

impl ChainResolution {
    pub fn is_balanced(&self) -> bool {
        self.value.is_none()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnembedStats {
    pub broken_chain_count: usize,
    pub balanced_chain_count: usize,
    pub repaired_by_bruteforce: bool,
    pub repaired_randomly: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnembedOptions {
    pub balanced_limit: usize,
    /// Apply single-qubit correction to samples that had a broken chain.
    pub sqc: bool,
}

impl Default for UnembedOptions {
    fn default() -> Self {
        UnembedOptions {
            balanced_limit: DEFAULT_BALANCED_LIMIT,
            sqc: false,
        }
    }
}

/// Read-weighted totals over a whole sample set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UnembedSummary {
    pub reads: u64,
    pub chains: usize,
    pub broken_chains: u64,
    pub balanced_chains: u64,
    pub reads_with_broken_chain: u64,
    pub bruteforce_repairs: u64,
    pub random_repairs: u64,
}

impl UnembedSummary {
    /// Fraction of (read, chain) pairs whose chain was broken.
    pub fn broken_rate(&self) -> f64 {
        let total = self.reads as f64 * self.chains as f64;
        if total == 0.0 {
            0.0
        } else {
            self.broken_chains as f64 / total
        }
    }

    pub fn merge(&mut self, other: &UnembedSummary) {
        self.reads += other.reads;
        self.chains = self.chains.max(other.chains);
        self.broken_chains += other.broken_chains;
        self.balanced_chains += other.balanced_chains;
        self.reads_with_broken_chain += other.reads_with_broken_chain;
        self.bruteforce_repairs += other.bruteforce_repairs;
        self.random_repairs += other.random_repairs;
    }
}

/// Majority vote per chain.
pub fn resolve_chains(hw_sample: &Assignment, e: &Embedding) -> Result<Vec<ChainResolution>> {
    e.chains
        .iter()
        .map(|(&program, chain)| {
            let mut sum = 0i64;
            for &p in chain {
                let s = hw_sample.get(p).ok_or(Error::MissingVariable(p))?;
                sum += i64::from(s.sign());
            }
            let len = chain.len() as i64;
            Ok(ChainResolution {
                program,
                value: match sum.signum() {
                    1 => Some(Spin::Up),
                    -1 => Some(Spin::Down),
                    _ => None,
                },
                broken: sum.abs() != len,
            })
        })
        .collect()
}

/// Converts one hardware sample to a logical sample of `logical`.
pub fn unembed_sample(
    hw_sample: &Assignment,
    e: &Embedding,
    logical: &IsingModel,
    balanced_limit: usize,
    seed: u64,
) -> Result<(Sample, UnembedStats)> {
    let resolved = resolve_chains(hw_sample, e)?;
    let mut stats = UnembedStats {
        broken_chain_count: resolved.iter().filter(|r| r.broken).count(),
        ..Default::default()
    };
    let mut base = Assignment::new();
    let mut balanced = Vec::new();
    for r in &resolved {
        match r.value {
            Some(s) => {
                base.insert(r.program, s);
            }
            None => balanced.push(r.program),
        }
    }
    stats.balanced_chain_count = balanced.len();

    let assignment = if balanced.is_empty() {
        base
    } else if balanced.len() <= balanced_limit {
        stats.repaired_by_bruteforce = true;
        best_completion(logical, &base, &balanced)?
    } else {
        stats.repaired_randomly = true;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = base;
        for &q in &balanced {
            a.insert(q, Spin::from_bit(rng.random()));
        }
        a
    };
    let energy = logical.energy(&assignment)?;
    Ok((
        Sample {
            assignment,
            energy,
            occurrences: 1,
        },
        stats,
    ))
}

/// Lowest-energy completion of `base` over the `free` qubits; ties go to
/// the lexicographically smallest assignment.
fn best_completion(logical: &IsingModel, base: &Assignment, free: &[QubitId]) -> Result<Assignment> {
    let mut best: Option<(f64, Assignment)> = None;
    for bits in 0u64..1 << free.len() {
        let mut a = base.clone();
        for (k, &q) in free.iter().enumerate() {
            a.insert(q, Spin::from_bit(bits >> k & 1 == 1));
        }
        let e = logical.energy(&a)?;
        let better = match &best {
            None => true,
            Some((be, ba)) => e < *be || (e == *be && a < *ba),
        };
        if better {
            best = Some((e, a));
        }
    }
    Ok(best.expect("at least one completion").1)
}

/// Unembeds every distinct sample of `set`, carrying occurrences over.
/// Random repairs are seeded per distinct sample from `seed`.
pub fn unembed_sampleset(
    set: &SampleSet,
    e: &Embedding,
    logical: &IsingModel,
    opts: UnembedOptions,
    seed: u64,
) -> Result<(SampleSet, UnembedSummary)> {
    let mut summary = UnembedSummary {
        chains: e.len(),
        ..Default::default()
    };
    let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
    for (i, hw) in set.samples.iter().enumerate() {
        let (sample, stats) = unembed_sample(
            &hw.assignment,
            e,
            logical,
            opts.balanced_limit,
            split_seed(seed, i as u64),
        )?;
        let k = hw.occurrences;
        summary.reads += k;
        summary.broken_chains += stats.broken_chain_count as u64 * k;
        summary.balanced_chains += stats.balanced_chain_count as u64 * k;
        if stats.broken_chain_count > 0 {
            summary.reads_with_broken_chain += k;
        }
        if stats.repaired_by_bruteforce {
            summary.bruteforce_repairs += k;
        }
        if stats.repaired_randomly {
            summary.random_repairs += k;
        }
        let a = if opts.sqc && stats.broken_chain_count > 0 {
            sqc(logical, &sample.assignment)?
        } else {
            sample.assignment
        };
        *counts.entry(a).or_default() += k;
    }
    Ok((SampleSet::from_counts(logical, counts)?, summary))
}

/// Copies each program spin onto every qubit of its chain.
pub fn embed_assignment(a: &Assignment, e: &Embedding) -> Result<Assignment> {
    let mut out = Assignment::new();
    for (&q, chain) in &e.chains {
        let s = a.get(q).ok_or(Error::MissingVariable(q))?;
        for &p in chain {
            out.insert(p, s);
        }
    }
    Ok(out)
}

/// Single-qubit correction: repeatedly flips the spin with the largest
/// energy decrease (lowest qubit id on ties) until no flip improves.
pub fn sqc(model: &IsingModel, a: &Assignment) -> Result<Assignment> {
    let dense = DenseIsing::new(model);
    let mut spins = dense
        .spins_of(a)
        .ok_or_else(|| Error::MissingVariable(model.variables().find(|&q| !a.contains(q)).unwrap_or_default()))?;
    let eps = 1e-12 * (1.0 + model.max_abs_coefficient());
    loop {
        let mut best = (-eps, usize::MAX);
        for i in 0..dense.len() {
            let d = dense.flip_delta(i, &spins);
            if d < best.0 {
                best = (d, i);
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        spins[best.1] = -spins[best.1];
    }
    let mut out = a.clone();
    for (q, s) in dense.to_assignment(&spins).iter() {
        out.insert(q, s);
    }
    Ok(out)
}
