use super::{Assignment, IsingModel, QubitId, Spin};

/// Index-based view of an [`IsingModel`] for inner loops.
///
/// Variables are numbered `0..n` in ascending qubit order. Spins are `i8`
/// values in `{-1, +1}`.
#[derive(Clone, Debug)]
pub struct DenseIsing {
    pub ids: Vec<QubitId>,
    pub h: Vec<f64>,
    /// Quadratic terms `(i, j, J)` with `i < j`, in the model's key order.
    pub couplers: Vec<(usize, usize, f64)>,
    pub adj: Vec<Vec<(usize, f64)>>,
    pub offset: f64,
}

impl DenseIsing {
    pub fn new(model: &IsingModel) -> Self {
        let ids: Vec<QubitId> = model.variables().collect();
        let index = |q: QubitId| ids.binary_search(&q).expect("variable indexed");
        let mut h = vec![0.0; ids.len()];
        for (q, v) in model.linear_terms() {
            h[index(q)] = v;
        }
        let mut adj = vec![Vec::new(); ids.len()];
        let mut couplers = Vec::with_capacity(model.num_interactions());
        for (a, b, v) in model.quadratic_terms() {
            let (i, j) = (index(a), index(b));
            couplers.push((i, j, v));
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        DenseIsing {
            ids,
            h,
            couplers,
            adj,
            offset: model.offset(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Energy with the same summation order as [`IsingModel::energy`], so
    /// results agree bit for bit.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = 0.0;
        for (i, &v) in self.h.iter().enumerate() {
            // absent linear keys contribute exactly +0.0 or -0.0, which
            // leaves any non-zero partial sum unchanged
            e += v * f64::from(spins[i]);
        }
        for &(i, j, v) in &self.couplers {
            e += v * (f64::from(spins[i]) * f64::from(spins[j]));
        }
        e + self.offset
    }

    /// `h_i + Σ_j J_ij z_j`.
    #[inline]
    pub fn local_field(&self, i: usize, spins: &[i8]) -> f64 {
        let mut f = self.h[i];
        for &(j, v) in &self.adj[i] {
            f += v * f64::from(spins[j]);
        }
        f
    }

    /// Energy change from flipping spin `i`.
    #[inline]
    pub fn flip_delta(&self, i: usize, spins: &[i8]) -> f64 {
        -2.0 * f64::from(spins[i]) * self.local_field(i, spins)
    }

    pub fn to_assignment(&self, spins: &[i8]) -> Assignment {
        self.ids
            .iter()
            .zip(spins)
            .map(|(&q, &s)| (q, if s > 0 { Spin::Up } else { Spin::Down }))
            .collect()
    }

    /// Spins for `a` in index order; `None` if a variable is missing.
    pub fn spins_of(&self, a: &Assignment) -> Option<Vec<i8>> {
        self.ids.iter().map(|&q| a.get(q).map(Spin::sign)).collect()
    }
}
