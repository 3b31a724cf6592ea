//! Executors that turn an Ising model into a [`SampleSet`].
//!
//! Every sampler takes an explicit seed per call. Randomised samplers derive
//! one independent ChaCha8 stream per read (`seed_from_u64(seed)` with
//! `set_stream(read_index)`), so results do not depend on how reads are
//! scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{brute_force_ground_with_limit, Assignment, DenseIsing, IsingModel, SampleSet, ORACLE_LIMIT};

pub trait Sampler: Send + Sync {
    fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet>;

    fn num_reads(&self) -> u64;
}

impl<S: Sampler + ?Sized> Sampler for Box<S> {
    fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet> {
        (**self).sample(model, seed)
    }

    fn num_reads(&self) -> u64 {
        (**self).num_reads()
    }
}

impl<S: Sampler + ?Sized> Sampler for &S {
    fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet> {
        (**self).sample(model, seed)
    }

    fn num_reads(&self) -> u64 {
        (**self).num_reads()
    }
}

/// Derives an independent 64-bit seed for `stream` from `seed`
/// (SplitMix64 finaliser applied twice).
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(stream))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Exact,
    Sa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub num_reads: u64,
    pub seed: u64,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Independent per-qubit flip probability applied after sampling.
    pub flip_p: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            kind: SamplerKind::Exact,
            num_reads: 4000,
            seed: 0,
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 10.0,
            flip_p: 0.0,
        }
    }
}

impl SamplerConfig {
    pub fn check(&self) -> Result<()> {
        if self.num_reads == 0 {
            return Err(Error::Parameter("num_reads must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.flip_p) {
            return Err(Error::Parameter(format!("flip probability {} outside [0, 1)", self.flip_p)));
        }
        if self.kind == SamplerKind::Sa
            && (self.sweeps == 0 || !(self.beta_start > 0.0) || !(self.beta_end > 0.0))
        {
            return Err(Error::Parameter("SA needs sweeps >= 1 and positive betas".into()));
        }
        Ok(())
    }

    /// The configured sampler, wrapped in flip noise when `flip_p > 0`.
    pub fn build(&self) -> Result<Box<dyn Sampler>> {
        self.check()?;
        let inner: Box<dyn Sampler> = match self.kind {
            SamplerKind::Exact => Box::new(ExactSampler::new(self.num_reads)),
            SamplerKind::Sa => Box::new(SaSampler {
                num_reads: self.num_reads,
                sweeps: self.sweeps,
                beta_start: self.beta_start,
                beta_end: self.beta_end,
            }),
        };
        if self.flip_p > 0.0 {
            Ok(Box::new(with_flip_noise(inner, self.flip_p, self.seed)?))
        } else {
            Ok(inner)
        }
    }
}

/// Returns the exact ground state as a single sample carrying every read.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    pub num_reads: u64,
    pub limit: usize,
}

impl ExactSampler {
    pub fn new(num_reads: u64) -> Self {
        ExactSampler {
            num_reads,
            limit: ORACLE_LIMIT,
        }
    }
}

impl Sampler for ExactSampler {
    fn sample(&self, model: &IsingModel, _seed: u64) -> Result<SampleSet> {
        let (a, _) = brute_force_ground_with_limit(model, self.limit)?;
        SampleSet::from_counts(model, BTreeMap::from([(a, self.num_reads)]))
    }

    fn num_reads(&self) -> u64 {
        self.num_reads
    }
}

/// Independent simulated-annealing restarts with single-spin Metropolis
/// sweeps over a geometric inverse-temperature schedule.
#[derive(Clone, Debug)]
pub struct SaSampler {
    pub num_reads: u64,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for SaSampler {
    fn default() -> Self {
        let c = SamplerConfig::default();
        SaSampler {
            num_reads: c.num_reads,
            sweeps: c.sweeps,
            beta_start: c.beta_start,
            beta_end: c.beta_end,
        }
    }
}

pub fn geometric_schedule(beta_start: f64, beta_end: f64, sweeps: usize) -> Vec<f64> {
    if sweeps <= 1 {
        return vec![beta_end; sweeps];
    }
    let ratio = (beta_end / beta_start).ln() / (sweeps - 1) as f64;
    (0..sweeps).map(|k| beta_start * (ratio * k as f64).exp()).collect()
}

impl SaSampler {
    fn anneal(&self, dense: &DenseIsing, schedule: &[f64], seed: u64, read: u64) -> Vec<i8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(read);
        let n = dense.len();
        let mut spins: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let mut field: Vec<f64> = (0..n).map(|i| dense.local_field(i, &spins)).collect();
        for &beta in schedule {
            for i in 0..n {
                let delta = -2.0 * f64::from(spins[i]) * field[i];
                if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                    spins[i] = -spins[i];
                    let s = 2.0 * f64::from(spins[i]);
                    for &(j, v) in &dense.adj[i] {
                        field[j] += v * s;
                    }
                }
            }
        }
        spins
    }
}

impl Sampler for SaSampler {
    fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet> {
        let dense = DenseIsing::new(model);
        let schedule = geometric_schedule(self.beta_start, self.beta_end, self.sweeps);
        let reads: Vec<Vec<i8>> = (0..self.num_reads)
            .into_par_iter()
            .map(|r| self.anneal(&dense, &schedule, seed, r))
            .collect();
        let mut counts: BTreeMap<Vec<i8>, u64> = BTreeMap::new();
        for r in reads {
            *counts.entry(r).or_default() += 1;
        }
        let counts = counts
            .into_iter()
            .map(|(s, k)| (dense.to_assignment(&s), k))
            .collect();
        SampleSet::from_counts(model, counts)
    }

    fn num_reads(&self) -> u64 {
        self.num_reads
    }
}

/// Flips every qubit of every read independently with probability `p`
/// after the inner sampler runs.
#[derive(Clone, Debug)]
pub struct FlipNoise<S> {
    pub inner: S,
    pub p: f64,
    pub seed: u64,
}

pub fn with_flip_noise<S: Sampler>(inner: S, p: f64, seed: u64) -> Result<FlipNoise<S>> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Parameter(format!("flip probability {p} outside [0, 1)")));
    }
    Ok(FlipNoise { inner, p, seed })
}

impl<S: Sampler> Sampler for FlipNoise<S> {
    fn sample(&self, model: &IsingModel, seed: u64) -> Result<SampleSet> {
        let clean = self.inner.sample(model, seed)?;
        if self.p == 0.0 {
            return Ok(clean);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(self.seed, seed));
        let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
        for read in clean.reads() {
            let noisy: Assignment = read
                .iter()
                .map(|(q, s)| (q, if rng.random_bool(self.p) { s.flip() } else { s }))
                .collect();
            *counts.entry(noisy).or_default() += 1;
        }
        SampleSet::from_counts(model, counts)
    }

    fn num_reads(&self) -> u64 {
        self.inner.num_reads()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::Spin;

    #[test]
    fn exact_single_field() {
        let m = IsingModel::from_terms([(0, -1.0)], []).unwrap();
        let set = ExactSampler::new(4000).sample(&m, 0).unwrap();
        assert_eq!(set.samples.len(), 1);
        let s = set.best().unwrap();
        assert_eq!(s.assignment.get(0), Some(Spin::Up));
        assert_eq!(s.energy, -1.0);
        assert_eq!(s.occurrences, 4000);
    }

    #[test]
    fn exact_ferromagnet() {
        let m = IsingModel::from_terms([], [(0, 1, -1.0)]).unwrap();
        assert_eq!(ExactSampler::new(10).sample(&m, 0).unwrap().min_energy(), Some(-1.0));
    }

    #[test]
    fn exact_too_large() {
        let mut m = IsingModel::new();
        for q in 0..30 {
            m.add_variable(q);
        }
        assert!(matches!(ExactSampler::new(1).sample(&m, 0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn sa_no_barrier() {
        let m = IsingModel::from_terms([(0, 5.0)], []).unwrap();
        let sa = SaSampler {
            num_reads: 200,
            sweeps: 50,
            ..Default::default()
        };
        let set = sa.sample(&m, 3).unwrap();
        assert_eq!(set.samples.len(), 1);
        assert_eq!(set.best().unwrap().assignment.get(0), Some(Spin::Down));
        assert_eq!(set.num_reads, 200);
    }

    #[test]
    fn sa_deterministic() {
        let m = IsingModel::from_terms([(0, 0.3), (2, -0.1)], [(0, 1, 1.0), (1, 2, -0.7), (0, 2, 0.4)]).unwrap();
        let sa = SaSampler {
            num_reads: 300,
            sweeps: 20,
            ..Default::default()
        };
        assert_eq!(sa.sample(&m, 9).unwrap(), sa.sample(&m, 9).unwrap());
    }

    #[test]
    fn schedule_endpoints() {
        let s = geometric_schedule(0.1, 10.0, 1000);
        assert_eq!(s.len(), 1000);
        assert!((s[0] - 0.1).abs() < 1e-15);
        assert!((s[999] - 10.0).abs() < 1e-9);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_noise_is_identity() {
        let m = IsingModel::from_terms([(0, 0.2)], [(0, 1, -1.0)]).unwrap();
        let sa = SaSampler {
            num_reads: 100,
            sweeps: 10,
            ..Default::default()
        };
        let noisy = with_flip_noise(sa.clone(), 0.0, 1).unwrap();
        assert_eq!(noisy.sample(&m, 4).unwrap(), sa.sample(&m, 4).unwrap());
    }

    #[test]
    fn noise_rejects_bad_p() {
        assert!(with_flip_noise(ExactSampler::new(1), 1.0, 0).is_err());
        assert!(with_flip_noise(ExactSampler::new(1), -0.1, 0).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = SamplerConfig {
            num_reads: 0,
            ..Default::default()
        };
        assert!(bad.build().is_err());
        let cfg = SamplerConfig {
            flip_p: 0.1,
            ..Default::default()
        };
        assert_eq!(cfg.build().unwrap().num_reads(), 4000);
    }

    #[test]
    fn split_seed_spreads() {
        assert_ne!(split_seed(0, 0), split_seed(0, 1));
        assert_ne!(split_seed(1, 0), split_seed(0, 1));
        assert_eq!(split_seed(5, 7), split_seed(5, 7));
    }
}
