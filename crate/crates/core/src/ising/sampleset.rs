use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Assignment, IsingModel, QubitId, Spin};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub assignment: Assignment,
    pub energy: f64,
    pub occurrences: u64,
}

/// Distinct samples sorted by energy (then assignment), plus the number of
/// reads they were drawn from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub num_reads: u64,
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    spins: Vec<i8>,
    energy: f64,
    occ: u64,
}

impl SampleSet {
    /// Aggregates raw reads by identical assignment and scores them on
    /// `model`.
    pub fn from_reads<I>(model: &IsingModel, reads: I) -> Result<SampleSet>
    where
        I: IntoIterator<Item = Assignment>,
    {
        let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
        for a in reads {
            *counts.entry(a).or_default() += 1;
        }
        Self::from_counts(model, counts)
    }

    pub fn from_counts(model: &IsingModel, counts: BTreeMap<Assignment, u64>) -> Result<SampleSet> {
        let mut samples = Vec::with_capacity(counts.len());
        let mut num_reads = 0;
        for (assignment, occurrences) in counts {
            let energy = model.energy(&assignment)?;
            num_reads += occurrences;
            samples.push(Sample {
                assignment,
                energy,
                occurrences,
            });
        }
        let mut set = SampleSet { samples, num_reads };
        set.sort();
        Ok(set)
    }

    pub fn sort(&mut self) {
        self.samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.best().map(|s| s.energy)
    }

    /// Occurrence-weighted mean energy.
    pub fn mean_energy(&self) -> Option<f64> {
        if self.num_reads == 0 {
            return None;
        }
        let total: f64 = self
            .samples
            .iter()
            .map(|s| s.energy * s.occurrences as f64)
            .sum();
        Some(total / self.num_reads as f64)
    }

    /// Expands into one assignment per read.
    pub fn reads(&self) -> impl Iterator<Item = &Assignment> + '_ {
        self.samples
            .iter()
            .flat_map(|s| std::iter::repeat_n(&s.assignment, s.occurrences as usize))
    }

    /// One JSON record per distinct assignment:
    /// `{"spins":[...],"energy":e,"occ":k}`, spins in ascending qubit order.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.samples {
            let line = SampleLine {
                spins: s.assignment.signs(),
                energy: s.energy,
                occ: s.occurrences,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads records written by [`SampleSet::write_jsonl`]; `variables`
    /// gives the qubit for each spin position.
    pub fn read_jsonl<R: BufRead>(r: R, variables: &[QubitId]) -> Result<SampleSet> {
        let mut samples = Vec::new();
        let mut num_reads = 0;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SampleLine = serde_json::from_str(&line)?;
            if rec.spins.len() != variables.len() {
                return Err(Error::Parameter(format!(
                    "sample has {} spins, expected {}",
                    rec.spins.len(),
                    variables.len()
                )));
            }
            let assignment = variables
                .iter()
                .zip(&rec.spins)
                .map(|(&q, &s)| {
                    Spin::from_sign(s.into())
                        .map(|s| (q, s))
                        .ok_or_else(|| Error::Parameter(format!("invalid spin {s}")))
                })
                .collect::<Result<Assignment>>()?;
            num_reads += rec.occ;
            samples.push(Sample {
                assignment,
                energy: rec.energy,
                occurrences: rec.occ,
            });
        }
        Ok(SampleSet { samples, num_reads })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_and_order() {
        let m = IsingModel::from_terms([(0, 1.0)], []).unwrap();
        let up: Assignment = [(0, Spin::Up)].into_iter().collect();
        let down: Assignment = [(0, Spin::Down)].into_iter().collect();
        let set = SampleSet::from_reads(&m, vec![up.clone(), down.clone(), up.clone()]).unwrap();
        assert_eq!(set.num_reads, 3);
        assert_eq!(set.samples.len(), 2);
        assert_eq!(set.best().unwrap().assignment, down);
        assert_eq!(set.samples[1].occurrences, 2);
        assert!((set.mean_energy().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(set.reads().count(), 3);
    }

    #[test]
    fn jsonl_round_trip() {
        let m = IsingModel::from_terms([(0, 0.1), (4, -0.3)], [(0, 4, 0.7)]).unwrap();
        let a: Assignment = [(0, Spin::Up), (4, Spin::Down)].into_iter().collect();
        let set = SampleSet::from_reads(&m, vec![a.clone(), a.flipped(), a]).unwrap();
        let mut buf = Vec::new();
        set.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("{\"spins\":["));
        let back = SampleSet::read_jsonl(&buf[..], &[0, 4]).unwrap();
        assert_eq!(back, set);
    }
}
