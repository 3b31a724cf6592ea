//! Analytical end-to-end runtime model.
//!
//! `T = T_emb + N_QMI * (T_queue + T_QMI + T_net) + T_classical`, with
//! `T_QMI = min(t_p + delta + r * t_s, cap)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Baseline,
    Skipper,
    SkipperG,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Baseline => "baseline",
            Scheme::Skipper => "skipper",
            Scheme::SkipperG => "skipper-g",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Scheme::Baseline),
            "skipper" => Ok(Scheme::Skipper),
            "skipper-g" | "skipperg" => Ok(Scheme::SkipperG),
            _ => Err(Error::Parameter(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessMode {
    /// One second of queueing per job.
    Shared,
    /// No queueing.
    Dedicated,
}

impl AccessMode {
    pub fn queue_time(self) -> f64 {
        match self {
            AccessMode::Shared => 1.0,
            AccessMode::Dedicated => 0.0,
        }
    }
}

/// Times in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuntimeParams {
    pub t_emb_baseline: f64,
    pub t_queue: f64,
    pub t_net: f64,
    pub t_classical: f64,
    pub t_p: f64,
    pub delta: f64,
    pub t_s: f64,
    pub reads: u64,
    pub t_qmi_cap: f64,
    /// Charge every QMI the full cap instead of the read-count formula.
    pub assume_cap: bool,
}

impl Default for RuntimeParams {
    fn default() -> Self {
        RuntimeParams {
            t_emb_baseline: 1800.0,
            t_queue: AccessMode::Shared.queue_time(),
            t_net: 1.0,
            t_classical: 2.0,
            t_p: 0.0,
            delta: 0.010,
            t_s: 0.0,
            reads: 4000,
            t_qmi_cap: 2.0,
            assume_cap: true,
        }
    }
}

impl RuntimeParams {
    pub fn with_mode(&self, mode: AccessMode) -> Self {
        RuntimeParams {
            t_queue: mode.queue_time(),
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("t_emb_baseline", self.t_emb_baseline),
            ("t_queue", self.t_queue),
            ("t_net", self.t_net),
            ("t_classical", self.t_classical),
            ("t_p", self.t_p),
            ("delta", self.delta),
            ("t_s", self.t_s),
            ("t_qmi_cap", self.t_qmi_cap),
        ];
        for (name, v) in fields {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        Ok(())
    }
}

/// Execution time of one QMI, never above the cap.
pub fn t_qmi(p: &RuntimeParams) -> f64 {
    if p.assume_cap {
        return p.t_qmi_cap;
    }
    (p.t_p + p.delta + p.reads as f64 * p.t_s).min(p.t_qmi_cap)
}

/// Embedding time after `c` cuts: the baseline for `c <= 1`, otherwise
/// the baseline divided by `c`.
pub fn t_emb(p: &RuntimeParams, c: usize) -> f64 {
    if c <= 1 {
        p.t_emb_baseline
    } else {
        p.t_emb_baseline / c as f64
    }
}

/// QMI counts a scheme may legitimately report for `c` cuts.
pub fn valid_qmi_counts(scheme: Scheme, c: usize) -> Vec<usize> {
    match scheme {
        Scheme::Baseline => vec![1],
        Scheme::Skipper if c == 0 => vec![1],
        Scheme::Skipper => vec![1 << c, 1 << (c - 1)],
        Scheme::SkipperG => vec![2 * c + 1],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub scheme: Scheme,
    pub cuts: usize,
    pub n_qmi: usize,
    pub t_emb: f64,
    pub t_qmi: f64,
    /// Every QMI submitted as a separate sequential job.
    pub total: f64,
    /// Independent QMIs submitted concurrently: one job round for the
    /// breadth-first tree, one per level (plus the root) for the greedy one.
    pub total_parallel: f64,
}

pub fn total_runtime(p: &RuntimeParams, n_qmi: usize, c: usize, scheme: Scheme) -> Result<RuntimeEstimate> {
    p.check()?;
    if !valid_qmi_counts(scheme, c).contains(&n_qmi) {
        return Err(Error::Parameter(format!(
            "{scheme} with {c} cut(s) cannot execute {n_qmi} QMIs"
        )));
    }
    // the greedy scheme embeds every level in parallel; the uncut root
    // dominates
    let emb = match scheme {
        Scheme::Baseline | Scheme::SkipperG => p.t_emb_baseline,
        Scheme::Skipper => t_emb(p, c),
    };
    let qmi = t_qmi(p);
    let job = p.t_queue + qmi + p.t_net;
    let rounds = match scheme {
        Scheme::Baseline | Scheme::Skipper => 1,
        Scheme::SkipperG => c + 1,
    };
    Ok(RuntimeEstimate {
        scheme,
        cuts: c,
        n_qmi,
        t_emb: emb,
        t_qmi: qmi,
        total: emb + n_qmi as f64 * job + p.t_classical,
        total_parallel: emb + rounds as f64 * job + p.t_classical,
    })
}

/// One row per scheme and access mode for `c` cuts. Skipper is charged the
/// full `2^c` tree, or the halved tree when `halved` is set.
pub fn runtime_table(p: &RuntimeParams, c: usize, halved: bool) -> Result<Vec<(AccessMode, RuntimeEstimate)>> {
    let mut rows = Vec::new();
    for mode in [AccessMode::Shared, AccessMode::Dedicated] {
        let pm = p.with_mode(mode);
        let skipper_qmi = if c == 0 {
            1
        } else if halved {
            1 << (c - 1)
        } else {
            1 << c
        };
        rows.push((mode, total_runtime(&pm, 1, 0, Scheme::Baseline)?));
        rows.push((mode, total_runtime(&pm, skipper_qmi, c, Scheme::Skipper)?));
        rows.push((mode, total_runtime(&pm, 2 * c + 1, c, Scheme::SkipperG)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn formula(t_p: f64, delta: f64, reads: u64, t_s: f64) -> RuntimeParams {
        RuntimeParams {
            t_p,
            delta,
            reads,
            t_s,
            assume_cap: false,
            ..Default::default()
        }
    }

    #[test]
    fn qmi_formula_and_cap() {
        assert!((t_qmi(&formula(0.0, 0.01, 100, 0.0001)) - 0.02).abs() < 1e-15);
        assert_eq!(t_qmi(&formula(0.0, 0.01, 1_000_000_000, 0.0001)), 2.0);
        assert_eq!(t_qmi(&formula(0.3, 0.01, 0, 0.5)), 0.3 + 0.01);
        assert_eq!(t_qmi(&RuntimeParams::default()), 2.0);
    }

    #[test]
    fn embedding_time() {
        let p = RuntimeParams::default();
        assert_eq!(t_emb(&p, 10), 180.0);
        assert_eq!(t_emb(&p, 0), 1800.0);
        assert_eq!(t_emb(&p, 1), 1800.0);
    }

    #[test]
    fn totals() {
        let p = RuntimeParams::default();
        assert_eq!(total_runtime(&p, 1, 0, Scheme::Baseline).unwrap().total, 1806.0);
        let d = p.with_mode(AccessMode::Dedicated);
        let sk = total_runtime(&d, 1024, 11, Scheme::Skipper).unwrap();
        assert!((sk.total - (1800.0 / 11.0 + 1024.0 * 3.0 + 2.0)).abs() < 1e-9);
        assert!((sk.total - 3237.636).abs() < 1e-3);
        assert_eq!(total_runtime(&p, 23, 11, Scheme::SkipperG).unwrap().total, 1894.0);
    }

    #[test]
    fn mismatched_counts_rejected() {
        let p = RuntimeParams::default();
        assert!(total_runtime(&p, 2, 0, Scheme::Baseline).is_err());
        assert!(total_runtime(&p, 100, 5, Scheme::Skipper).is_err());
        assert!(total_runtime(&p, 22, 11, Scheme::SkipperG).is_err());
        let bad = RuntimeParams {
            t_net: -1.0,
            ..Default::default()
        };
        assert!(total_runtime(&bad, 1, 0, Scheme::Baseline).is_err());
    }

    #[test]
    fn table_has_every_scheme_and_mode() {
        let rows = runtime_table(&RuntimeParams::default(), 11, true).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].1.n_qmi, 1024);
    }

    proptest::proptest! {
        #[test]
        fn monotone_in_every_parameter(
            base in proptest::collection::vec(0.0f64..100.0, 8),
            bump in 0.0f64..50.0,
            which in 0usize..8,
            reads in 0u64..10_000,
            formula in proptest::bool::ANY,
        ) {
            let make = |v: &[f64]| RuntimeParams {
                t_emb_baseline: v[0],
                t_queue: v[1],
                t_net: v[2],
                t_classical: v[3],
                t_p: v[4],
                delta: v[5],
                t_s: v[6] / 1000.0,
                reads,
                t_qmi_cap: v[7],
                assume_cap: !formula,
            };
            let mut raised = base.clone();
            raised[which] += bump;
            let (lo, hi) = (make(&base), make(&raised));
            proptest::prop_assert!(t_qmi(&lo) <= lo.t_qmi_cap);
            for (scheme, n, c) in [(Scheme::Baseline, 1, 0), (Scheme::Skipper, 32, 5), (Scheme::SkipperG, 11, 5)] {
                let a = total_runtime(&lo, n, c, scheme).unwrap();
                let b = total_runtime(&hi, n, c, scheme).unwrap();
                proptest::prop_assert!(a.total <= b.total && a.total_parallel <= b.total_parallel);
            }
        }
    }
}
