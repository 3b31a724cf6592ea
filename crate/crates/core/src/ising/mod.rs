//! Sparse Ising models over ±1 spins.
//!
//! The energy of an assignment `z` is
//!
//! ```text
//! E(z) = offset + Σ h_i z_i + Σ_{i<j} J_ij z_i z_j
//! ```
//!
//! Linear and quadratic terms are kept in ordered maps so iteration order,
//! and therefore floating-point summation order, is deterministic. Fixing a
//! variable folds its contribution into the neighbours' linear terms and the
//! constant offset, which is what keeps decoded energies exact across the
//! pruning pipelines.

mod dense;
mod json;
mod oracle;
mod sampleset;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use dense::DenseIsing;
pub use json::ModelFile;
pub use oracle::{brute_force_ground, brute_force_ground_with_limit, ORACLE_LIMIT};
pub use sampleset::{Sample, SampleSet};

/// Label of a program or physical qubit.
pub type QubitId = u32;

/// A single spin value. `Down < Up`, which is the order used for
/// lexicographic tie-breaking between assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Spin::Down => -1.0,
            Spin::Up => 1.0,
        }
    }

    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Spin::Down => -1,
            Spin::Up => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    pub fn from_sign(s: i64) -> Option<Spin> {
        match s {
            -1 => Some(Spin::Down),
            1 => Some(Spin::Up),
            _ => None,
        }
    }

    /// `true` maps to `Up`.
    #[inline]
    pub fn from_bit(bit: bool) -> Spin {
        if bit {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Down => f.write_str("-1"),
            Spin::Up => f.write_str("+1"),
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Spin::from_sign(v).ok_or_else(|| serde::de::Error::custom(format!("spin must be -1 or +1, got {v}")))
    }
}

/// Spin values keyed by qubit.
///
/// The derived ordering compares spins in ascending qubit order, which is
/// the lexicographic rule used for deterministic witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<QubitId, Spin>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, q: QubitId) -> Option<Spin> {
        self.0.get(&q).copied()
    }

    pub fn insert(&mut self, q: QubitId, s: Spin) -> Option<Spin> {
        self.0.insert(q, s)
    }

    pub fn remove(&mut self, q: QubitId) -> Option<Spin> {
        self.0.remove(&q)
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.0.contains_key(&q)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (QubitId, Spin)> + '_ {
        self.0.iter().map(|(&q, &s)| (q, s))
    }

    pub fn qubits(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.0.keys().copied()
    }

    /// Every spin flipped.
    pub fn flipped(&self) -> Assignment {
        Assignment(self.0.iter().map(|(&q, &s)| (q, s.flip())).collect())
    }

    /// Union of two assignments with disjoint supports.
    pub fn union(&self, other: &Assignment) -> Result<Assignment> {
        let mut out = self.clone();
        for (q, s) in other.iter() {
            if out.insert(q, s).is_some() {
                return Err(Error::Overlap(q));
            }
        }
        Ok(out)
    }

    /// Spins as ±1 integers in ascending qubit order.
    pub fn signs(&self) -> Vec<i8> {
        self.0.values().map(|s| s.sign()).collect()
    }
}

impl FromIterator<(QubitId, Spin)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (QubitId, Spin)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// Sparse Ising Hamiltonian with a constant offset.
///
/// Quadratic keys are stored as `(i, j)` with `i < j`. An absent key is a
/// zero coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IsingModel {
    variables: BTreeSet<QubitId>,
    h: BTreeMap<QubitId, f64>,
    j: BTreeMap<(QubitId, QubitId), f64>,
    offset: f64,
}

#[inline]
fn canonical(i: QubitId, j: QubitId) -> (QubitId, QubitId) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn check_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{what} coefficient {v} is not finite")))
    }
}

impl IsingModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a model from linear and quadratic terms. Repeated quadratic
    /// pairs are summed.
    pub fn from_terms<H, J>(h: H, j: J) -> Result<Self>
    where
        H: IntoIterator<Item = (QubitId, f64)>,
        J: IntoIterator<Item = (QubitId, QubitId, f64)>,
    {
        let mut m = Self::new();
        for (q, v) in h {
            m.add_linear(q, v)?;
        }
        for (a, b, v) in j {
            m.add_quadratic(a, b, v)?;
        }
        Ok(m)
    }

    pub fn add_variable(&mut self, q: QubitId) {
        self.variables.insert(q);
    }

    pub fn set_linear(&mut self, q: QubitId, v: f64) -> Result<()> {
        check_finite(v, "linear")?;
        self.variables.insert(q);
        self.h.insert(q, v);
        Ok(())
    }

    pub fn add_linear(&mut self, q: QubitId, v: f64) -> Result<()> {
        check_finite(v, "linear")?;
        self.variables.insert(q);
        *self.h.entry(q).or_insert(0.0) += v;
        Ok(())
    }

    pub fn set_quadratic(&mut self, a: QubitId, b: QubitId, v: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidModel(format!("self-coupling on qubit {a}")));
        }
        check_finite(v, "quadratic")?;
        self.variables.insert(a);
        self.variables.insert(b);
        self.j.insert(canonical(a, b), v);
        Ok(())
    }

    pub fn add_quadratic(&mut self, a: QubitId, b: QubitId, v: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidModel(format!("self-coupling on qubit {a}")));
        }
        check_finite(v, "quadratic")?;
        self.variables.insert(a);
        self.variables.insert(b);
        *self.j.entry(canonical(a, b)).or_insert(0.0) += v;
        Ok(())
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self, q: QubitId) -> f64 {
        self.h.get(&q).copied().unwrap_or(0.0)
    }

    pub fn quadratic(&self, a: QubitId, b: QubitId) -> f64 {
        self.j.get(&canonical(a, b)).copied().unwrap_or(0.0)
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_interactions(&self) -> usize {
        self.j.len()
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.variables.contains(&q)
    }

    pub fn variables(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.variables.iter().copied()
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (QubitId, f64)> + '_ {
        self.h.iter().map(|(&q, &v)| (q, v))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = (QubitId, QubitId, f64)> + '_ {
        self.j.iter().map(|(&(a, b), &v)| (a, b, v))
    }

    /// Largest absolute linear or quadratic coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.h
            .values()
            .chain(self.j.values())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Interaction graph: every variable, and one edge per quadratic key.
    pub fn coupling_graph(&self) -> CouplingGraph {
        CouplingGraph {
            nodes: self.variables.iter().copied().collect(),
            edges: self.j.keys().copied().collect(),
        }
    }

    pub fn degree(&self, q: QubitId) -> usize {
        self.j.keys().filter(|&&(a, b)| a == q || b == q).count()
    }

    /// `offset + Σ h_i z_i + Σ J_ij z_i z_j`.
    ///
    /// Linear terms are summed first, then quadratic terms, each in key
    /// order, and the offset is added last.
    pub fn energy(&self, a: &Assignment) -> Result<f64> {
        let spin = |q: QubitId| a.get(q).ok_or(Error::MissingVariable(q));
        if let Some(missing) = self.variables.iter().find(|&&q| !a.contains(q)) {
            return Err(Error::MissingVariable(*missing));
        }
        let mut e = 0.0;
        for (&q, &v) in &self.h {
            e += v * spin(q)?.value();
        }
        for (&(p, q), &v) in &self.j {
            e += v * (spin(p)?.value() * spin(q)?.value());
        }
        Ok(e + self.offset)
    }

    /// Substitutes `s` for qubit `q`, returning a model over the remaining
    /// variables whose energies match the original on every completion.
    pub fn fix_qubit(&self, q: QubitId, s: Spin) -> Result<IsingModel> {
        let mut out = self.clone();
        out.fix_in_place(q, s)?;
        Ok(out)
    }

    /// Fixes every qubit in `fixing`, in ascending qubit order.
    pub fn fix_qubits(&self, fixing: &Assignment) -> Result<IsingModel> {
        if let Some(q) = fixing.qubits().find(|&q| !self.contains(q)) {
            return Err(Error::UnknownQubit(q));
        }
        let mut out = self.clone();
        for (q, s) in fixing.iter() {
            out.fix_in_place(q, s)?;
        }
        Ok(out)
    }

    fn fix_in_place(&mut self, q: QubitId, s: Spin) -> Result<()> {
        if !self.variables.remove(&q) {
            return Err(Error::UnknownQubit(q));
        }
        let sv = s.value();
        if let Some(hq) = self.h.remove(&q) {
            self.offset += hq * sv;
        }
        let touching: Vec<(QubitId, QubitId)> = self
            .j
            .keys()
            .filter(|&&(a, b)| a == q || b == q)
            .copied()
            .collect();
        for key in touching {
            let v = self.j.remove(&key).expect("key collected above");
            let other = if key.0 == q { key.1 } else { key.0 };
            *self.h.entry(other).or_insert(0.0) += v * sv;
        }
        Ok(())
    }

    /// `true` iff every stored linear coefficient is exactly zero.
    pub fn has_zero_linear(&self) -> bool {
        self.h.values().all(|&v| v == 0.0)
    }

    /// Variables by descending interaction degree, ties by ascending id.
    pub fn degree_order(&self) -> Vec<QubitId> {
        let mut deg: BTreeMap<QubitId, usize> = self.variables.iter().map(|&q| (q, 0)).collect();
        for &(a, b) in self.j.keys() {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        let mut order: Vec<(QubitId, usize)> = deg.into_iter().collect();
        order.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        order.into_iter().map(|(q, _)| q).collect()
    }

    /// Same model with the offset cleared.
    pub fn without_offset(&self) -> IsingModel {
        IsingModel {
            offset: 0.0,
            ..self.clone()
        }
    }
}

/// Undirected simple graph over qubit labels, used as the source of an
/// embedding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CouplingGraph {
    pub nodes: Vec<QubitId>,
    pub edges: Vec<(QubitId, QubitId)>,
}

impl CouplingGraph {
    /// Builds a graph from an edge list; endpoints become nodes. Self loops
    /// and duplicate edges are dropped.
    pub fn from_edges<I: IntoIterator<Item = (QubitId, QubitId)>>(edges: I) -> Self {
        let mut nodes = BTreeSet::new();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            nodes.insert(a);
            nodes.insert(b);
            if a != b {
                set.insert(canonical(a, b));
            }
        }
        CouplingGraph {
            nodes: nodes.into_iter().collect(),
            edges: set.into_iter().collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> BTreeMap<QubitId, usize> {
        let mut deg: BTreeMap<QubitId, usize> = self.nodes.iter().map(|&q| (q, 0)).collect();
        for &(a, b) in &self.edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assign(pairs: &[(QubitId, i64)]) -> Assignment {
        pairs.iter().map(|&(q, s)| (q, Spin::from_sign(s).unwrap())).collect()
    }

    fn random_model(n: u32, density: f64, seed: u64) -> IsingModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = IsingModel::new();
        for q in 0..n {
            m.set_linear(q, rng.random_range(-1.0..1.0)).unwrap();
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(density) {
                    m.set_quadratic(a, b, rng.random_range(-1.0..1.0)).unwrap();
                }
            }
        }
        m
    }

    fn random_assignment(m: &IsingModel, rng: &mut ChaCha8Rng) -> Assignment {
        m.variables().map(|q| (q, Spin::from_bit(rng.random()))).collect()
    }

    #[test]
    fn energy_single_coupler() {
        let m = IsingModel::from_terms([], [(0, 1, 1.0)]).unwrap();
        assert_eq!(m.energy(&assign(&[(0, 1), (1, 1)])).unwrap(), 1.0);
    }

    #[test]
    fn energy_with_fields() {
        let m = IsingModel::from_terms([(0, 0.5), (1, -1.0)], [(0, 1, 2.0)]).unwrap();
        assert_eq!(m.energy(&assign(&[(0, -1), (1, 1)])).unwrap(), -3.5);
    }

    #[test]
    fn energy_matches_naive_double_loop() {
        let m = random_model(8, 0.5, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_assignment(&m, &mut rng);
            let z: Vec<f64> = (0..8).map(|q| a.get(q).unwrap().value()).collect();
            let mut naive = m.offset();
            for i in 0..8u32 {
                naive += m.linear(i) * z[i as usize];
                for j in 0..8u32 {
                    if i < j {
                        naive += m.quadratic(i, j) * z[i as usize] * z[j as usize];
                    }
                }
            }
            assert!((m.energy(&a).unwrap() - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_missing_variable() {
        let m = IsingModel::from_terms([(3, 1.0)], [(0, 1, 1.0)]).unwrap();
        let err = m.energy(&assign(&[(0, 1), (1, 1)])).unwrap_err();
        assert!(matches!(err, Error::MissingVariable(3)));
    }

    #[test]
    fn self_coupling_rejected() {
        let mut m = IsingModel::new();
        assert!(m.set_quadratic(2, 2, 1.0).is_err());
        assert!(m.set_linear(0, f64::NAN).is_err());
    }

    #[test]
    fn quadratic_keys_canonical() {
        let mut m = IsingModel::new();
        m.set_quadratic(5, 2, 1.5).unwrap();
        assert_eq!(m.quadratic_terms().collect::<Vec<_>>(), vec![(2, 5, 1.5)]);
        assert_eq!(m.quadratic(5, 2), 1.5);
    }

    #[test]
    fn fix_up() {
        let m = IsingModel::from_terms([(0, 0.5), (1, -1.0)], [(0, 1, 2.0)]).unwrap();
        let r = m.fix_qubit(0, Spin::Up).unwrap();
        assert_eq!(r.linear_terms().collect::<Vec<_>>(), vec![(1, 1.0)]);
        assert_eq!(r.num_interactions(), 0);
        assert_eq!(r.offset(), 0.5);
        assert!(!r.contains(0));
    }

    #[test]
    fn fix_down() {
        let m = IsingModel::from_terms([(0, 0.5), (1, -1.0)], [(0, 1, 2.0)]).unwrap();
        let r = m.fix_qubit(0, Spin::Down).unwrap();
        assert_eq!(r.linear(1), -3.0);
        assert_eq!(r.offset(), -0.5);
        assert_eq!(r.energy(&assign(&[(1, 1)])).unwrap(), -3.5);
        assert_eq!(m.energy(&assign(&[(0, -1), (1, 1)])).unwrap(), -3.5);
    }

    #[test]
    fn fix_unknown_qubit() {
        let m = IsingModel::from_terms([(0, 1.0)], []).unwrap();
        assert!(matches!(m.fix_qubit(9, Spin::Up), Err(Error::UnknownQubit(9))));
        assert!(matches!(
            m.fix_qubits(&assign(&[(9, 1)])),
            Err(Error::UnknownQubit(9))
        ));
    }

    #[test]
    fn fix_restricted_minimum_matches_exhaustive() {
        let m = random_model(12, 0.4, 3);
        let fixing = assign(&[(2, 1), (5, -1), (9, 1)]);
        let reduced = m.fix_qubits(&fixing).unwrap();
        // exhaustive over the original, restricted to the fixing
        let mut best_orig = f64::INFINITY;
        for bits in 0u32..1 << 12 {
            let a: Assignment = (0..12).map(|q| (q, Spin::from_bit(bits >> q & 1 == 1))).collect();
            if fixing.iter().all(|(q, s)| a.get(q) == Some(s)) {
                best_orig = best_orig.min(m.energy(&a).unwrap());
            }
        }
        let free: Vec<QubitId> = reduced.variables().collect();
        let mut best_red = f64::INFINITY;
        for bits in 0u32..1 << free.len() {
            let a: Assignment = free
                .iter()
                .enumerate()
                .map(|(k, &q)| (q, Spin::from_bit(bits >> k & 1 == 1)))
                .collect();
            best_red = best_red.min(reduced.energy(&a).unwrap());
        }
        assert!((best_orig - best_red).abs() < 1e-9);
    }

    #[test]
    fn fix_empty_is_identity() {
        let m = random_model(6, 0.5, 1);
        assert_eq!(m.fix_qubits(&Assignment::new()).unwrap(), m);
    }

    #[test]
    fn fix_order_independent() {
        let m = IsingModel::from_terms(
            [(0, 0.5), (1, -0.25), (2, 1.0)],
            [(0, 1, 2.0), (1, 2, -1.5), (0, 2, 0.75)],
        )
        .unwrap();
        let ab = m.fix_qubit(0, Spin::Up).unwrap().fix_qubit(1, Spin::Down).unwrap();
        let ba = m.fix_qubit(1, Spin::Down).unwrap().fix_qubit(0, Spin::Up).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab, m.fix_qubits(&assign(&[(0, 1), (1, -1)])).unwrap());
    }

    #[test]
    fn fix_star_hub() {
        let m = IsingModel::from_terms([], (0..4).map(|leaf| (7, leaf, 1.0))).unwrap();
        let r = m.fix_qubit(7, Spin::Up).unwrap();
        assert_eq!(r.num_variables(), 4);
        assert_eq!(r.num_interactions(), 0);
    }

    #[test]
    fn zero_linear_detection() {
        let m = IsingModel::from_terms([], [(0, 1, 1.0)]).unwrap();
        assert!(m.has_zero_linear());
        let m = IsingModel::from_terms([(0, 1e-12)], []).unwrap();
        assert!(!m.has_zero_linear());
    }

    #[test]
    fn degree_order_star() {
        let m = IsingModel::from_terms([], (0..4).map(|leaf| (7, leaf, 1.0))).unwrap();
        assert_eq!(m.degree_order(), vec![7, 0, 1, 2, 3]);
    }

    #[test]
    fn degree_order_all_ties() {
        let m = IsingModel::from_terms([(4, 1.0), (1, 1.0), (3, 0.0)], []).unwrap();
        assert_eq!(m.degree_order(), vec![1, 3, 4]);
    }

    #[test]
    fn union_overlap() {
        let a = assign(&[(0, 1)]);
        let b = assign(&[(0, -1)]);
        assert!(matches!(a.union(&b), Err(Error::Overlap(0))));
    }

    #[test]
    fn assignment_lexicographic_order() {
        assert!(assign(&[(0, -1), (1, 1)]) < assign(&[(0, 1), (1, -1)]));
        assert!(assign(&[(0, -1), (1, -1)]) < assign(&[(0, -1), (1, 1)]));
    }
}
