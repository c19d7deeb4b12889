//! Command-line front end: build instances, persist RR collections, run selection and
//! adaptive sampling, and evaluate solutions by simulation.
//!
//! Exit codes: 0 success, 2 usage, 3 validation, 4 I/O.

mod decode;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use matroid_im::bench::{run_quality_sweep, run_scaling_sweep, write_csv, Algo};
use matroid_im::graph::load_edge_list;
use matroid_im::instances::{read_collection, write_collection, RrFile};
use matroid_im::ramp::{ramp, rm_a_simplified, RampConfig, RampReport};
use matroid_im::selection::{amp, greedy, local_greedy, threshold_greedy, AmpOptions, SearchStrategy};
use matroid_im::synth::{erdos_renyi, preferential_attachment, SynthWeights};
use matroid_im::{
    grow_collection, make_instance, monte_carlo_objective, AdvMode, DiffusionModel, Instance, InstanceParams,
    RRCollection, RngStream, SelectionResult, WeightVector, Weighting,
};

pub use decode::{Decoded, Decoder};

/// Environment variable that overrides every `--seed` flag.
pub const SEED_ENV: &str = "MATROID_IM_SEED";

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] matroid_im::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use matroid_im::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Lib(E::Io(_) | E::Corrupt(_)) => EXIT_IO,
            CliError::Lib(_) => EXIT_VALIDATION,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "matroid-im", version, about = "Influence maximization under matroid constraints")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample an RR collection and write it to a file.
    Generate(GenerateArgs),
    /// Run an element-selection algorithm on a stored RR collection.
    Select(SelectArgs),
    /// Adaptive sampling with AMP (or the greedy RM baseline).
    Ramp(RampArgs),
    /// Monte Carlo estimate of a solution's objective.
    Evaluate(EvaluateArgs),
    /// Experiment sweeps written as CSV.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Write a synthetic graph as an edge list.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Im,
    Rm,
    Mrim,
    Advim,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Ic,
    Lt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    /// Third column of the edge list.
    Explicit,
    /// `1 / indeg(v)` on every edge into `v`.
    Wc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AdvModeArg {
    EmptyMiss,
    Regenerate,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Edge list: `src dst [p]` per line.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "explicit")]
    pub weighting: WeightingArg,
    #[arg(long, value_enum)]
    pub instance: KindArg,
    #[arg(long, value_enum, default_value = "ic")]
    pub model: ModelArg,
    /// IM/MRIM: seeds per round. RM: campaigns per node (default 1).
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of rounds (MRIM) or campaigns (RM).
    #[arg(long = "T")]
    pub rounds: Option<usize>,
    /// RM revenue per campaign, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// AdvIM node-blocking budget.
    #[arg(long, default_value_t = 0)]
    pub kv: usize,
    /// AdvIM edge-blocking budget.
    #[arg(long, default_value_t = 0)]
    pub ke: usize,
    /// AdvIM misinformation seeds, one node label per line.
    #[arg(long)]
    pub seeds_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "empty-miss")]
    pub adv_mode: AdvModeArg,
}

impl InstanceArgs {
    fn model(&self) -> DiffusionModel {
        match self.model {
            ModelArg::Ic => DiffusionModel::IC,
            ModelArg::Lt => DiffusionModel::LT,
        }
    }

    fn adv_mode(&self) -> AdvMode {
        match self.adv_mode {
            AdvModeArg::EmptyMiss => AdvMode::EmptyMiss,
            AdvModeArg::Regenerate => AdvMode::Regenerate,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Instance> {
        let weighting = match self.weighting {
            WeightingArg::Explicit => Weighting::Explicit,
            WeightingArg::Wc => Weighting::InverseInDegree,
        };
        let graph = load_edge_list(&self.graph, weighting)?;
        let n = graph.node_count();
        let need =
            |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--{flag} is required for this instance")));
        let params = match self.instance {
            KindArg::Im => InstanceParams::IM { k: need(self.k, "k")? },
            KindArg::Rm => {
                let alpha = match (&self.alpha, self.rounds) {
                    (Some(a), Some(t)) if a.len() != t => {
                        return Err(usage(format!("--alpha has {} entries but --T is {t}", a.len())))
                    }
                    (Some(a), _) => a.clone(),
                    (None, Some(t)) => vec![1.0; t],
                    (None, None) => return Err(usage("RM needs --alpha or --T")),
                };
                InstanceParams::rm_uniform(alpha, n, self.k.unwrap_or(1))
            }
            KindArg::Mrim => InstanceParams::MRIM { rounds: need(self.rounds, "T")?, k: need(self.k, "k")? },
            KindArg::Advim => {
                let path = self.seeds_file.as_ref().ok_or_else(|| usage("AdvIM needs --seeds-file"))?;
                let mut seeds = Vec::new();
                for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                    let line = line?;
                    let t = line.trim();
                    if t.is_empty() || t.starts_with('#') {
                        continue;
                    }
                    let label: u64 = t.parse().map_err(|_| matroid_im::Error::Parse {
                        line: i + 1,
                        msg: format!("invalid node label `{t}`"),
                    })?;
                    let v = graph.node_of_label(label).ok_or_else(|| {
                        matroid_im::Error::Validation(format!("seed label {label} is not in the graph"))
                    })?;
                    seeds.push(v);
                }
                InstanceParams::AdvIM { seeds, k_v: self.kv, k_e: self.ke, mode: self.adv_mode(), kappa_seed: seed }
            }
        };
        Ok(make_instance(graph, self.model(), params)?)
    }
}

/// `MATROID_IM_SEED` if set, else the flag value.
pub fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            let s =
                v.trim().parse().map_err(|_| usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`")))?;
            log::info!("seed {s} taken from {SEED_ENV}");
            Ok(s)
        }
        Err(_) => Ok(flag),
    }
}

fn set_threads(n: Option<usize>) {
    let n = n.unwrap_or(0);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        log::debug!("thread pool already configured: {e}");
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    /// Number of RR sets.
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
struct GenerateSummary {
    theta: usize,
    ground_size: usize,
    kappa: f64,
    mean_rr_size: f64,
    nonempty: usize,
    seed: u64,
    wall_time_ms: f64,
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    set_threads(a.threads);
    let seed = resolve_seed(a.seed)?;
    let inst = a.inst.build(seed)?;
    let start = Instant::now();
    let mut coll = RRCollection::new(inst.ground().size(), seed, 0);
    grow_collection(&inst, &mut coll, a.count)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    let summary = GenerateSummary {
        theta: coll.len(),
        ground_size: coll.ground_size(),
        kappa: inst.kappa(),
        mean_rr_size: if coll.is_empty() { 0.0 } else { coll.total_size() as f64 / coll.len() as f64 },
        nonempty: coll.nonempty(),
        seed,
        wall_time_ms: wall,
    };
    write_collection(&a.out, &RrFile::new(&inst, coll))?;
    write_json(&summary, None)
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum SelectAlgo {
    Greedy,
    Local,
    Threshold,
    Amp,
    AmpPm,
    AmpWeighted,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub rr: PathBuf,
    #[arg(long, value_enum)]
    pub algo: SelectAlgo,
    /// AMP step size ε_s; must be 1/t for a positive integer t.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Threshold-Greedy decay.
    #[arg(long, default_value_t = matroid_im::selection::DEFAULT_XI)]
    pub xi: f64,
    /// Adoption probabilities for amp-weighted: `element_id w` per line.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// JSON result (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solution file, one decoded element per line.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// `round,f,bound` rows of the search trace.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct SelectOutput {
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub chosen: Vec<Decoded>,
    pub chosen_ids: Vec<usize>,
    pub coverage: usize,
    pub objective: f64,
    pub estimate: f64,
    pub theta: usize,
    pub f_trace: Vec<f64>,
    pub rounding_swaps: usize,
    pub wall_time_ms: f64,
}

fn write_trace(path: &Path, res: &SelectionResult) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "round,f,bound")?;
    for (i, f) in res.f_trace.iter().enumerate() {
        match res.bound_trace.get(i) {
            Some(b) => writeln!(w, "{i},{f},{b}")?,
            None => writeln!(w, "{i},{f},")?,
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_select(a: &SelectArgs) -> Result<()> {
    set_threads(Some(1));
    if a.weights.is_some() && a.algo != SelectAlgo::AmpWeighted {
        return Err(usage("--weights only applies to --algo amp-weighted"));
    }
    let file = read_collection(&a.rr)?;
    let coll = &file.collection;
    let m = file.matroid()?;
    let amp_opts = |search| AmpOptions { search, track_bound: a.trace_csv.is_some(), trace_rounding: false };
    let res = match a.algo {
        SelectAlgo::Greedy => greedy(coll, &m)?,
        SelectAlgo::Local => local_greedy(coll, &m)?,
        SelectAlgo::Threshold => threshold_greedy(coll, &m, a.xi)?,
        SelectAlgo::Amp => amp::<f64>(coll, &m, a.eps, amp_opts(SearchStrategy::General))?,
        SelectAlgo::AmpPm => amp::<f64>(coll, &m, a.eps, amp_opts(SearchStrategy::Partition))?,
        SelectAlgo::AmpWeighted => {
            let w = match &a.weights {
                Some(p) => WeightVector::<f64>::load(p, coll.ground_size())?,
                None => WeightVector::ones(coll.ground_size()),
            };
            matroid_im::amp_weighted(coll, &m, a.eps, &w, amp_opts(SearchStrategy::Auto))?
        }
    };
    let decoder = Decoder::from_file(&file);
    if let Some(p) = &a.trace_csv {
        write_trace(p, &res)?;
    }
    if let Some(p) = &a.solution {
        decoder.write_solution(p, &res.chosen)?;
    }
    let theta = coll.len();
    let out = SelectOutput {
        algorithm: res.algorithm.clone(),
        epsilon: res.epsilon,
        chosen: decoder.decode_all(&res.chosen),
        chosen_ids: res.chosen.clone(),
        coverage: res.coverage,
        objective: res.objective,
        estimate: if theta == 0 { 0.0 } else { file.header.kappa * res.coverage as f64 / theta as f64 },
        theta,
        f_trace: res.f_trace,
        rounding_swaps: res.rounding_swaps,
        wall_time_ms: res.wall_time_ms,
    };
    write_json(&out, a.out.as_deref())
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum RampAlgo {
    Ramp,
    RmA,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum SearchArg {
    Auto,
    General,
    Partition,
}

#[derive(Debug, Clone, Args)]
pub struct RampArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "on")]
    pub tighten: OnOff,
    #[arg(long, value_enum, default_value = "ramp")]
    pub algo: RampAlgo,
    #[arg(long, value_enum, default_value = "auto")]
    pub search: SearchArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Per-iteration `iteration,theta,sigma_lower,sigma_upper,ratio` rows.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RampOutput {
    #[serde(flatten)]
    pub report: RampReport,
    pub decoded: Vec<Decoded>,
}

fn cmd_ramp(a: &RampArgs) -> Result<()> {
    set_threads(a.threads);
    let seed = resolve_seed(a.seed)?;
    let inst = a.inst.build(seed)?;
    let report = match a.algo {
        RampAlgo::Ramp => {
            let cfg = RampConfig {
                eps: a.eps,
                delta: a.delta,
                tighten_bound: a.tighten == OnOff::On,
                adv_mode: a.inst.adv_mode(),
                search: match a.search {
                    SearchArg::Auto => SearchStrategy::Auto,
                    SearchArg::General => SearchStrategy::General,
                    SearchArg::Partition => SearchStrategy::Partition,
                },
            };
            ramp(&inst, &cfg, seed)?
        }
        RampAlgo::RmA => rm_a_simplified(&inst, a.eps, a.delta, seed)?,
    };
    let decoder = Decoder::from_instance(&inst);
    if let Some(p) = &a.trace_csv {
        let mut w = create(p)?;
        writeln!(w, "iteration,theta,sigma_lower,sigma_upper,ratio")?;
        for (i, it) in report.iterations.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", i + 1, it.theta, it.sigma_lower, it.sigma_upper, it.ratio)?;
        }
        w.flush()?;
    }
    if let Some(p) = &a.solution {
        decoder.write_solution(p, &report.chosen)?;
    }
    let decoded = decoder.decode_all(&report.chosen);
    write_json(&RampOutput { report, decoded }, a.out.as_deref())
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub sims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct EvaluateOutput {
    mean: f64,
    stderr: f64,
    sims: usize,
    seed: u64,
    size: usize,
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    set_threads(Some(1));
    let seed = resolve_seed(a.seed)?;
    let inst = a.inst.build(seed)?;
    let decoder = Decoder::from_instance(&inst);
    let set = decoder.read_solution(&a.solution)?;
    let est = monte_carlo_objective(&inst, &set, a.sims, RngStream::new(seed, 0))?;
    write_json(
        &EvaluateOutput { mean: est.mean, stderr: est.stderr, sims: a.sims, seed, size: set.len() },
        a.out.as_deref(),
    )
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Coverage and simulated objective per (algorithm, θ, seed).
    Quality(QualityArgs),
    /// RAMP (and RM-A-Simplified on RM) sample counts per (ε, seed).
    Scaling(ScalingArgs),
}

fn parse_algo(s: &str) -> std::result::Result<Algo, String> {
    s.parse().map_err(|e: matroid_im::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct QualityArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    /// Comma-separated: greedy, local, threshold[:xi], amp[:eps], amp-pm[:eps].
    #[arg(long, value_delimiter = ',', value_parser = parse_algo, default_value = "greedy,local,threshold,amp:0.5,amp-pm:0.5")]
    pub algos: Vec<Algo>,
    /// RR-set counts; defaults to 2^1 .. 2^15.
    #[arg(long, value_delimiter = ',')]
    pub thetas: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    /// Monte Carlo runs per cell (0 skips simulation).
    #[arg(long, default_value_t = 1000)]
    pub sims: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.4,0.3,0.2,0.1")]
    pub eps_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

fn csv_out<T: Serialize>(rows: &[T], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_csv(rows, create(p)?)?,
        None => write_csv(rows, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_bench(c: &BenchCommand) -> Result<()> {
    match c {
        BenchCommand::Quality(a) => {
            set_threads(a.threads);
            let inst = a.inst.build(0)?;
            let thetas = a.thetas.clone().unwrap_or_else(|| (1..=15).map(|i| 1usize << i).collect());
            let rows = run_quality_sweep(&inst, &a.algos, &thetas, &a.seeds, a.sims)?;
            csv_out(&rows, a.out.as_deref())
        }
        BenchCommand::Scaling(a) => {
            set_threads(a.threads);
            let inst = a.inst.build(0)?;
            let rows = run_scaling_sweep(&inst, &a.eps_grid, &a.seeds, a.delta)?;
            csv_out(&rows, a.out.as_deref())
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GeneratorArg {
    Er,
    Pa,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub generator: GeneratorArg,
    #[arg(long)]
    pub nodes: usize,
    /// Edge count (Erdős–Rényi).
    #[arg(long, default_value_t = 0)]
    pub edges: usize,
    /// Links per new node (preferential attachment).
    #[arg(long, default_value_t = 2)]
    pub attach: usize,
    /// Constant edge probability; weighted cascade when omitted.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let seed = resolve_seed(a.seed)?;
    let w = a.p.map_or(SynthWeights::WeightedCascade, SynthWeights::Constant);
    let g = match a.generator {
        GeneratorArg::Er => erdos_renyi(a.nodes, a.edges, w, seed)?,
        GeneratorArg::Pa => preferential_attachment(a.nodes, a.attach, w, seed)?,
    };
    matroid_im::graph::write_edge_list(&g, &a.out)?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Select(a) => cmd_select(a),
        Command::Ramp(a) => cmd_ramp(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bench(c) => cmd_bench(c),
        Command::Synth(a) => cmd_synth(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
