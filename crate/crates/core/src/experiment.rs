//! Reproducible experiments: configuration, run reports and CSV tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{ba_family, ba_model, capacity_search, energy_residual, BaParams, LinearMode};
use crate::embed::{EmbedderParams, EmbeddingMetrics};
use crate::error::{Error, Result};
use crate::hwgraph::HardwareSpec;
use crate::ising::{brute_force_ground, IsingModel, Sample, ORACLE_LIMIT};
use crate::pipeline::{HardwareTarget, Target};
use crate::qmi::ChainStrength;
use crate::runtime::{runtime_table, total_runtime, RuntimeEstimate, RuntimeParams, Scheme};
use crate::sampler::{split_seed, SamplerConfig};
use crate::unembed::{UnembedOptions, UnembedSummary};
use crate::{skipper, skipperg};

/// Everything that determines a run besides the code version. Command-line
/// flags override the values loaded from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: Option<PathBuf>,
    pub scheme: Scheme,
    pub cuts: usize,
    pub sampler: SamplerConfig,
    /// `None` samples the logical model directly.
    pub hw: Option<HardwareSpec>,
    pub seed: u64,
    pub chain_strength: ChainStrength,
    pub embedder: EmbedderParams,
    pub unembed: UnembedOptions,
    pub bench: Option<BaParams>,
    pub runtime: RuntimeParams,
    pub capacity: CapacityConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: None,
            scheme: Scheme::Skipper,
            cuts: 0,
            sampler: SamplerConfig::default(),
            hw: None,
            seed: 0,
            chain_strength: ChainStrength::default(),
            embedder: EmbedderParams::default(),
            unembed: UnembedOptions::default(),
            bench: None,
            runtime: RuntimeParams::default(),
            capacity: CapacityConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityConfig {
    pub m: usize,
    pub linear: LinearMode,
    pub cuts: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig {
            m: 3,
            linear: LinearMode::Zero,
            cuts: vec![0, 5],
            seeds: vec![0],
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        self.sampler.check()?;
        self.embedder.check()?;
        self.runtime.check()?;
        if self.scheme == Scheme::Baseline && self.cuts != 0 {
            return Err(Error::Parameter("the baseline scheme takes no cuts".into()));
        }
        Ok(())
    }

    pub fn target(&self) -> Result<Target> {
        Ok(match &self.hw {
            None => Target::Logical,
            Some(spec) => Target::Hardware(HardwareTarget {
                graph: spec.build()?,
                embedder: self.embedder.clone(),
                chain_strength: self.chain_strength,
                unembed: self.unembed,
            }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub scheme: Scheme,
    pub cuts: usize,
    pub num_variables: usize,
    pub num_interactions: usize,
    pub n_qmi: usize,
    pub n_embeddings: usize,
    pub best: Sample,
    /// Exact optimum, when the model is small enough to enumerate.
    pub e_global: Option<f64>,
    pub energy_residual: Option<f64>,
    pub cut_qubits: Vec<u32>,
    pub symmetry_halved: bool,
    /// Shared embedding statistics (the uncut root for the greedy scheme).
    pub embedding: Option<EmbeddingMetrics>,
    pub unembed: Option<UnembedSummary>,
    pub runtime: Option<RuntimeEstimate>,
    /// Per sub-problem or per tree-node records.
    pub details: serde_json::Value,
    pub warnings: Vec<String>,
}

fn merge_summaries<'a, I: IntoIterator<Item = Option<&'a UnembedSummary>>>(it: I) -> Option<UnembedSummary> {
    it.into_iter().flatten().fold(None, |acc, s| {
        let mut total = acc.unwrap_or_default();
        total.merge(s);
        Some(total)
    })
}

/// Runs the configured scheme on `model`.
pub fn run_model(model: &IsingModel, cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check()?;
    let target = cfg.target()?;
    let sampler = cfg.sampler.build()?;
    let seed = split_seed(cfg.seed, 0);

    let mut report = match cfg.scheme {
        Scheme::Baseline | Scheme::Skipper => {
            let r = skipper::run(model, cfg.cuts, &sampler, &target, seed)?;
            RunReport {
                config: cfg.clone(),
                scheme: cfg.scheme,
                cuts: cfg.cuts,
                num_variables: model.num_variables(),
                num_interactions: model.num_interactions(),
                n_qmi: r.n_qmi,
                n_embeddings: r.n_embeddings,
                best: r.best.clone(),
                e_global: None,
                energy_residual: None,
                cut_qubits: r.plan.qubits.clone(),
                symmetry_halved: r.plan.symmetry_halved,
                embedding: r.metrics().cloned(),
                unembed: merge_summaries(r.subproblems.iter().map(|s| s.unembed.as_ref())),
                runtime: None,
                details: serde_json::to_value(&r.subproblems)?,
                warnings: Vec::new(),
            }
        }
        Scheme::SkipperG => {
            let r = skipperg::run(model, cfg.cuts, &sampler, &target, seed)?;
            RunReport {
                config: cfg.clone(),
                scheme: cfg.scheme,
                cuts: cfg.cuts,
                num_variables: model.num_variables(),
                num_interactions: model.num_interactions(),
                n_qmi: r.n_qmi,
                n_embeddings: r.n_embeddings,
                best: r.best.clone(),
                e_global: None,
                energy_residual: None,
                cut_qubits: r.cuts.clone(),
                symmetry_halved: false,
                embedding: r.nodes[0].metrics.clone(),
                unembed: merge_summaries(r.nodes.iter().map(|n| n.unembed.as_ref())),
                runtime: None,
                details: serde_json::to_value(&r.nodes)?,
                warnings: r.warnings.clone(),
            }
        }
    };
    if model.num_variables() <= ORACLE_LIMIT {
        let (_, e) = brute_force_ground(model)?;
        report.e_global = Some(e);
        report.energy_residual = Some(energy_residual(report.best.energy, e));
    }
    // a truncated greedy descent has no closed-form QMI count
    report.runtime = total_runtime(&cfg.runtime, report.n_qmi, report.cut_qubits.len(), cfg.scheme).ok();
    Ok(report)
}

/// Loads `cfg.model` and runs it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let path = cfg
        .model
        .as_ref()
        .ok_or_else(|| Error::Parameter("no model path given".into()))?;
    run_model(&IsingModel::load(path)?, cfg)
}

/// Model JSON with a provenance header recording the generator inputs.
pub fn generate_json(p: &BaParams) -> Result<String> {
    let model = ba_model(p)?;
    let provenance = serde_json::json!({
        "generator": "barabasi-albert",
        "n": p.n,
        "m": p.m,
        "seed": p.seed,
        "linear": p.linear,
        "weights": "standard-normal",
    });
    let mut s = model.to_json_with_provenance(provenance)?;
    s.push('\n');
    Ok(s)
}

pub const CAPACITY_HEADER: &str = "family,m,c,seed,capacity,avg_chain,max_chain,variance,unused_qubits,ER";

/// One capacity row per (seed, c). The ER column is left empty: capacity
/// probes embed but never sample.
pub fn capacity_csv(cfg: &ExperimentConfig) -> Result<String> {
    let cap = &cfg.capacity;
    let hw = cfg
        .hw
        .as_ref()
        .ok_or_else(|| Error::Parameter("capacity sweeps need a hardware graph".into()))?
        .build()?;
    for &c in &cap.cuts {
        if c > skipper::MAX_CUTS {
            return Err(Error::CutsOutOfRange {
                c,
                max: skipper::MAX_CUTS,
            });
        }
    }
    let mut out = String::from(CAPACITY_HEADER);
    out.push('\n');
    for &seed in &cap.seeds {
        for &c in &cap.cuts {
            let family = ba_family(cap.m, seed, cap.linear);
            let r = capacity_search(family, &hw, c, &cfg.embedder.with_seed(seed))?;
            let (avg, max, var, unused) = match &r.metrics {
                Some(m) => (
                    m.avg_chain_len.to_string(),
                    m.max_chain_len.to_string(),
                    m.chain_len_variance.to_string(),
                    m.unused_qubits.to_string(),
                ),
                None => Default::default(),
            };
            out.push_str(&format!(
                "ba-{},{},{c},{seed},{},{avg},{max},{var},{unused},\n",
                cap.m, cap.m, r.capacity
            ));
        }
    }
    Ok(out)
}

pub const RUNTIME_HEADER: &str = "scheme,mode,cuts,n_qmi,t_emb,t_qmi,total,total_parallel";

pub fn runtime_csv(p: &RuntimeParams, cuts: usize, halved: bool) -> Result<String> {
    if cuts > skipper::MAX_CUTS {
        return Err(Error::CutsOutOfRange {
            c: cuts,
            max: skipper::MAX_CUTS,
        });
    }
    let mut out = String::from(RUNTIME_HEADER);
    out.push('\n');
    for (mode, r) in runtime_table(p, cuts, halved)? {
        let mode = serde_json::to_value(mode)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.scheme,
            mode.as_str().unwrap_or_default(),
            r.cuts,
            r.n_qmi,
            r.t_emb,
            r.t_qmi,
            r.total,
            r.total_parallel
        ));
    }
    Ok(out)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::Parameter("output path is empty".into()));
    }
    if path.is_dir() {
        return Err(Error::Parameter(format!("output path {} is a directory", path.display())));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
