//! `qdsfm` command-line tool.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdsfm::apps::{Balance, BinningRule, Normalization};
use qdsfm::solver::MethodChoice;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_181_203;

#[derive(Debug, Parser)]
#[command(name = "qdsfm", version, about = "Quadratic decomposable submodular function minimization")]
pub struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for the AP projections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Only log errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Project a point onto the cone of a single atom.
    Project(ProjectArgs),
    /// Semi-supervised learning on a hypergraph.
    Ssl(SslArgs),
    /// Personalized PageRank.
    Pagerank(PagerankArgs),
    /// Run several solver/projection pairs on one instance.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Rcd,
    Ap,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rcd => "rcd",
            Self::Ap => "ap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Mnp,
    Fw,
    Exact,
}

impl From<Method> for MethodChoice {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => MethodChoice::Auto,
            Method::Mnp => MethodChoice::Mnp,
            Method::Fw => MethodChoice::Fw,
            Method::Exact => MethodChoice::Exact,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Budget {
    /// Solver iterations (RCD: projections, AP: sweeps). Defaults to 1000 R for RCD and 1000 for AP.
    #[arg(long)]
    pub max_iters: Option<u64>,
    /// Wall-clock budget for the solve loop.
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// Stop once the duality gap reaches this value.
    #[arg(long, default_value_t = 1e-9)]
    pub target_gap: f64,
    /// Iterations between gap checkpoints. Defaults to R for RCD and 1 for AP.
    #[arg(long)]
    pub stride: Option<u64>,
    /// Projection oracle; auto uses the exact sweep for cut atoms.
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Optimality tolerance of each projection.
    #[arg(long, default_value_t = 1e-12)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Rcd)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub budget: Budget,
    /// Trace CSV (iter,primal,dual,gap,seconds).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Solution JSON; printed to stdout when absent.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Index of the atom in the instance file.
    #[arg(long)]
    pub atom: usize,
    /// Point to project, comma separated, in the atom's sorted member order.
    /// Defaults to `2 W a` restricted to the atom.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub target: Option<Vec<f64>>,
    /// Diagonal metric, comma separated. Defaults to `W^-1` restricted to the atom.
    #[arg(long, value_delimiter = ',')]
    pub wtilde: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Method::Mnp)]
    pub method: Method,
    #[arg(long, default_value_t = 1e-12)]
    pub delta: f64,
    /// MNP MAJOR loops or FW iterations.
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Binning {
    EqualWidth,
    EqualFrequency,
}

impl From<Binning> for BinningRule {
    fn from(b: Binning) -> Self {
        match b {
            Binning::EqualWidth => BinningRule::EqualWidth,
            Binning::EqualFrequency => BinningRule::EqualFrequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Degree,
    Identity,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Degree => Normalization::Degree,
            NormArg::Identity => Normalization::Identity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BalanceArg {
    Min,
    Max,
}

impl From<BalanceArg> for Balance {
    fn from(b: BalanceArg) -> Self {
        match b {
            BalanceArg::Min => Balance::Min,
            BalanceArg::Max => Balance::Max,
        }
    }
}

#[derive(Debug, Args)]
pub struct SslArgs {
    /// Generate a two-cluster synthetic hypergraph.
    #[arg(long, conflicts_with_all = ["hypergraph", "dataset"])]
    pub synthetic: bool,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Hyperedges drawn inside each cluster.
    #[arg(long, default_value_t = 500)]
    pub within: usize,
    /// Hyperedges drawn over all vertices.
    #[arg(long, default_value_t = 1000)]
    pub across: usize,
    #[arg(long, default_value_t = 20)]
    pub edge_size: usize,
    /// Labeled vertices per cluster.
    #[arg(long, default_value_t = 3)]
    pub labeled: usize,
    /// Runs with seeds `seed, seed + 1, ...`; medians are reported.
    #[arg(long, default_value_t = 1)]
    pub repeat: u64,

    /// Hypergraph JSON.
    #[arg(long, requires = "labels")]
    pub hypergraph: Option<PathBuf>,
    /// CSV with a header row; rows are vertices.
    #[arg(long, requires_all = ["schema", "labels"])]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Binning::EqualWidth)]
    pub binning: Binning,
    /// Labels JSON.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// CSV column holding true classes, used to report the error.
    #[arg(long, requires = "dataset")]
    pub truth_column: Option<String>,

    #[arg(long, default_value_t = 0.02)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = NormArg::Degree)]
    pub normalization: NormArg,
    /// Denominator of the sweep-cut ratio.
    #[arg(long, value_enum, default_value_t = BalanceArg::Min)]
    pub balance: BalanceArg,
    #[arg(long, value_enum, default_value_t = Algorithm::Rcd)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub budget: Budget,
    /// Result JSON; printed to stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Trace CSV of the first run.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Writes the class-0 instance of the first run.
    #[arg(long)]
    pub write_instance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PagerankArgs {
    /// Graph JSON {"n", "edges", "s"}.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Algorithm::Rcd)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Comma separated `algorithm+method` pairs, e.g. `rcd+exact,ap+exact`.
    #[arg(long, value_delimiter = ',', default_value = "rcd+exact,ap+exact")]
    pub methods: Vec<String>,
    /// Wall-clock budget per method.
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// RCD iterations per method; AP runs `max_iters / R` sweeps.
    #[arg(long)]
    pub max_iters: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub target_gap: f64,
    /// RCD iterations between checkpoints; AP checkpoints every `stride / R` sweeps.
    #[arg(long)]
    pub stride: Option<u64>,
    /// Long-format CSV method,iter,seconds,gap; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QDSFM_LOG", level)).init();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
