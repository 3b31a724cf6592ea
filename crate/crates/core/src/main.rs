use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainskip::bench::{BaParams, LinearMode};
use chainskip::error::{Error, Result};
use chainskip::experiment::{
    capacity_csv, generate_json, run_experiment, runtime_csv, write_atomic, ExperimentConfig,
};
use chainskip::hwgraph::HardwareSpec;
use chainskip::runtime::Scheme;
use chainskip::sampler::SamplerKind;

/// Chain-skipping experiments on minor-embedded Ising problems.
///
/// Exit codes: 0 success, 1 internal error, 2 invalid configuration or
/// usage, 3 I/O failure, 4 embedding failure.
#[derive(Parser, Debug)]
#[command(name = "chainskip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded Barabasi-Albert Ising model.
    Generate(GenerateArgs),
    /// Run a scheme on a model and write a JSON report.
    Run(RunArgs),
    /// Sweep cut counts and report embedding capacity as CSV.
    Capacity(CapacityArgs),
    /// Tabulate the analytical runtime model as CSV.
    RuntimeModel(RuntimeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Baseline,
    Skipper,
    SkipperG,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Baseline => Scheme::Baseline,
            SchemeArg::Skipper => Scheme::Skipper,
            SchemeArg::SkipperG => Scheme::SkipperG,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplerArg {
    Exact,
    Sa,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LinearArg {
    Zero,
    Normal,
}

impl From<LinearArg> for LinearMode {
    fn from(l: LinearArg) -> LinearMode {
        match l {
            LinearArg::Zero => LinearMode::Zero,
            LinearArg::Normal => LinearMode::Normal,
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    linear: Option<LinearArg>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    cuts: Option<usize>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    #[arg(long)]
    reads: Option<u64>,
    #[arg(long)]
    noise_p: Option<f64>,
    /// `chimera:m,n,t`, `grid:r,c` or `complete:n`; omit to sample the
    /// logical model directly.
    #[arg(long)]
    hw: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CapacityArgs {
    #[arg(long)]
    hw: Option<String>,
    /// Attachment factor of the BA family.
    #[arg(long)]
    m: Option<usize>,
    /// Cut counts, comma separated or an inclusive range `a..b`.
    #[arg(long)]
    cuts: Option<String>,
    /// Seeds, comma separated or an inclusive range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RuntimeArgs {
    #[arg(long, default_value_t = 11)]
    cuts: usize,
    /// Charge the full `2^c` tree instead of the symmetry-halved one.
    #[arg(long)]
    full_tree: bool,
    #[arg(long, allow_negative_numbers = true)]
    t_emb_baseline: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_net: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_classical: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_s: Option<f64>,
    #[arg(long)]
    reads: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    cap: Option<f64>,
    /// Use `t_p + delta + r * t_s` instead of charging the cap.
    #[arg(long)]
    formula: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn base_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    path.map_or_else(|| Ok(ExperimentConfig::default()), ExperimentConfig::load)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_list<T: std::str::FromStr + Copy + Into<u64> + TryFrom<u64>>(s: &str) -> Result<Vec<T>> {
    let bad = || Error::Parameter(format!("cannot parse list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return (a..=b).map(|v| T::try_from(v).map_err(|_| bad())).collect();
    }
    s.split(',').map(|x| x.trim().parse::<T>().map_err(|_| bad())).collect()
}

fn generate(a: GenerateArgs) -> Result<()> {
    let cfg = base_config(a.config.as_deref())?;
    let base = cfg.bench.unwrap_or(BaParams {
        n: 20,
        m: 2,
        seed: cfg.seed,
        linear: LinearMode::Zero,
    });
    let p = BaParams {
        n: a.n.unwrap_or(base.n),
        m: a.m.unwrap_or(base.m),
        seed: a.seed.unwrap_or(base.seed),
        linear: a.linear.map_or(base.linear, Into::into),
    };
    let json = generate_json(&p)?;
    write_atomic(&a.out, json.as_bytes())
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = base_config(a.config.as_deref())?;
    if let Some(m) = a.model {
        cfg.model = Some(m);
    }
    if let Some(s) = a.scheme {
        cfg.scheme = s.into();
    }
    if let Some(c) = a.cuts {
        cfg.cuts = c;
    }
    if let Some(s) = a.sampler {
        cfg.sampler.kind = match s {
            SamplerArg::Exact => SamplerKind::Exact,
            SamplerArg::Sa => SamplerKind::Sa,
        };
    }
    if let Some(r) = a.reads {
        cfg.sampler.num_reads = r;
    }
    if let Some(p) = a.noise_p {
        cfg.sampler.flip_p = p;
    }
    if let Some(hw) = a.hw {
        cfg.hw = Some(hw.parse::<HardwareSpec>()?);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
        cfg.sampler.seed = s;
    }
    let report = run_experiment(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(a.out.as_deref(), &json)
}

fn capacity(a: CapacityArgs) -> Result<()> {
    let mut cfg = base_config(a.config.as_deref())?;
    if let Some(hw) = a.hw {
        cfg.hw = Some(hw.parse::<HardwareSpec>()?);
    }
    if let Some(m) = a.m {
        cfg.capacity.m = m;
    }
    if let Some(c) = a.cuts {
        cfg.capacity.cuts = parse_list::<u64>(&c)?.into_iter().map(|c| c as usize).collect();
    }
    if let Some(s) = a.seeds {
        cfg.capacity.seeds = parse_list(&s)?;
    } else if let Some(s) = a.seed {
        cfg.capacity.seeds = vec![s];
    }
    emit(a.out.as_deref(), &capacity_csv(&cfg)?)
}

fn runtime_model(a: RuntimeArgs) -> Result<()> {
    let mut p = base_config(a.config.as_deref())?.runtime;
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut p.t_emb_baseline, a.t_emb_baseline);
    set(&mut p.t_net, a.t_net);
    set(&mut p.t_classical, a.t_classical);
    set(&mut p.t_p, a.t_p);
    set(&mut p.delta, a.delta);
    set(&mut p.t_s, a.t_s);
    set(&mut p.t_qmi_cap, a.cap);
    if let Some(r) = a.reads {
        p.reads = r;
    }
    if a.formula {
        p.assume_cap = false;
    }
    emit(a.out.as_deref(), &runtime_csv(&p, a.cuts, !a.full_tree)?)
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("CHAINSKIP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parameter(format!("CHAINSKIP_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Parameter(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Capacity(a) => capacity(a),
        Command::RuntimeModel(a) => runtime_model(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(chainskip::exit_code(&e) as u8)
        }
    }
}
