use super::{Assignment, DenseIsing, IsingModel};
use crate::error::{Error, Result};

/// Default variable limit for exhaustive search.
pub const ORACLE_LIMIT: usize = 24;

/// Exact ground state by exhaustive enumeration, limited to
/// [`ORACLE_LIMIT`] variables.
pub fn brute_force_ground(model: &IsingModel) -> Result<(Assignment, f64)> {
    brute_force_ground_with_limit(model, ORACLE_LIMIT)
}

/// Exact ground state and energy.
///
/// States are visited in Gray-code order with incremental energy updates.
/// Candidates whose running energy lies within a small window of the best
/// are re-scored with the canonical evaluator, so the returned energy is
/// exactly `model.energy(witness)` and ties are broken towards the
/// lexicographically smallest assignment (ascending qubit id, `-1 < +1`).
pub fn brute_force_ground_with_limit(model: &IsingModel, limit: usize) -> Result<(Assignment, f64)> {
    let n = model.num_variables();
    if n > limit || n >= 63 {
        return Err(Error::TooLarge { vars: n, limit });
    }
    let dense = DenseIsing::new(model);
    if n == 0 {
        return Ok((Assignment::new(), model.offset()));
    }

    let scale = 1.0
        + dense.h.iter().map(|v| v.abs()).sum::<f64>()
        + dense.couplers.iter().map(|c| c.2.abs()).sum::<f64>();
    let tol = 1e-9 * scale;

    // variable k lives at bit (n - 1 - k), so integer order on states is
    // lexicographic order on assignments
    let bit_of = |k: usize| n - 1 - k;
    let mut spins = vec![-1i8; n];
    let mut field: Vec<f64> = (0..n).map(|i| dense.local_field(i, &spins)).collect();
    let mut running = dense.energy(&spins);

    let mut state: u64 = 0;
    let mut best_state: u64 = 0;
    let mut best_running = running;
    let mut best_exact = running;

    let total: u64 = 1 << n;
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        let k = n - 1 - bit;
        let old = f64::from(spins[k]);
        running += -2.0 * old * field[k];
        spins[k] = -spins[k];
        let new = -old;
        for &(j, v) in &dense.adj[k] {
            field[j] += 2.0 * v * new;
        }
        state ^= 1 << bit_of(k);

        if running < best_running - tol {
            best_state = state;
            best_running = running;
            best_exact = f64::NAN;
        } else if running <= best_running + tol {
            if best_exact.is_nan() {
                best_exact = dense.energy(&state_spins(best_state, n));
            }
            let exact = dense.energy(&spins);
            if exact < best_exact || (exact == best_exact && state < best_state) {
                best_state = state;
                best_running = running;
                best_exact = exact;
            }
        }
    }

    let witness = dense.to_assignment(&state_spins(best_state, n));
    let energy = model.energy(&witness)?;
    Ok((witness, energy))
}

fn state_spins(state: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|k| if state >> (n - 1 - k) & 1 == 1 { 1 } else { -1 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{QubitId, Spin};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Second, independent implementation: evaluate every state with the
    /// sparse evaluator and keep the lexicographically smallest minimiser.
    fn naive_ground(m: &IsingModel) -> (Assignment, f64) {
        let vars: Vec<QubitId> = m.variables().collect();
        let n = vars.len();
        let mut best: Option<(Assignment, f64)> = None;
        for bits in 0u64..1 << n {
            let a: Assignment = vars
                .iter()
                .enumerate()
                .map(|(k, &q)| (q, Spin::from_bit(bits >> k & 1 == 1)))
                .collect();
            let e = m.energy(&a).unwrap();
            best = match best {
                None => Some((a, e)),
                Some((ba, be)) => {
                    if e < be || (e == be && a < ba) {
                        Some((a, e))
                    } else {
                        Some((ba, be))
                    }
                }
            };
        }
        best.unwrap()
    }

    fn random_model(n: u32, seed: u64) -> IsingModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = IsingModel::new();
        for q in 0..n {
            m.set_linear(q, rng.random_range(-1.0..1.0)).unwrap();
        }
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.3) {
                    m.set_quadratic(a, b, rng.random_range(-1.0..1.0)).unwrap();
                }
            }
        }
        m.set_offset(0.25);
        m
    }

    #[test]
    fn single_field() {
        let m = IsingModel::from_terms([(0, -1.0)], []).unwrap();
        let (a, e) = brute_force_ground(&m).unwrap();
        assert_eq!(a.get(0), Some(Spin::Up));
        assert_eq!(e, -1.0);
    }

    #[test]
    fn ferromagnet_tie_break() {
        let m = IsingModel::from_terms([], [(0, 1, -1.0)]).unwrap();
        let (a, e) = brute_force_ground(&m).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(a.signs(), vec![-1, -1]);
    }

    #[test]
    fn matches_naive_n16() {
        let m = random_model(16, 42);
        let (a, e) = brute_force_ground(&m).unwrap();
        let (na, ne) = naive_ground(&m);
        assert_eq!(e, ne);
        assert_eq!(a, na);
    }

    #[test]
    fn matches_naive_sparse_labels() {
        let m = IsingModel::from_terms(
            [(10, 0.0), (3, 0.5)],
            [(3, 10, -1.0), (10, 42, 1.0), (3, 42, 0.25)],
        )
        .unwrap();
        assert_eq!(brute_force_ground(&m).unwrap(), naive_ground(&m));
    }

    #[test]
    fn degenerate_zero_model() {
        let mut m = IsingModel::new();
        for q in 0..6 {
            m.add_variable(q);
        }
        let (a, e) = brute_force_ground(&m).unwrap();
        assert_eq!(e, 0.0);
        assert!(a.iter().all(|(_, s)| s == Spin::Down));
    }

    #[test]
    fn too_large() {
        let mut m = IsingModel::new();
        for q in 0..5 {
            m.add_variable(q);
        }
        assert!(matches!(
            brute_force_ground_with_limit(&m, 4),
            Err(Error::TooLarge { vars: 5, limit: 4 })
        ));
    }

    #[test]
    fn lower_than_random_assignments() {
        let m = random_model(14, 9);
        let (_, e) = brute_force_ground(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a: Assignment = m.variables().map(|q| (q, Spin::from_bit(rng.random()))).collect();
            assert!(e <= m.energy(&a).unwrap());
        }
    }
}
