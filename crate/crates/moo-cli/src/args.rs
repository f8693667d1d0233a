//! Command-line surface: one `moo` binary with four subcommands.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "moo",
    version,
    about = "Multi-objective exploration toolkit: optimize seeds, expand fronts, \
             parametrize and stitch them, and measure hypervolume",
    after_help = "Output directory resolution: the MOO_OUT_DIR environment variable \
                  overrides --out, which overrides the default ./moo-runs."
)]
pub struct Cli {
    /// Directory that receives one subdirectory per run
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a single optimizer from a seeded start point
    Optimize(OptimizeArgs),
    /// Run a tangent-expansion campaign (breadth-first over a record queue)
    Explore(ExploreArgs),
    /// Parametrize record chains by a scalar t and optionally stitch them
    Front(FrontArgs),
    /// Measure the hypervolume of the objective vectors in records files
    Hv(HvArgs),
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Benchmark id (see `moo optimize --help` errors for the known list)
    #[arg(long = "bench")]
    pub bench: String,
    /// Master seed; every random choice flows from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer: `mgda` (min-norm descent + line search) or `ws` (weighted sum)
    #[arg(long = "opt", default_value = "mgda")]
    pub optimizer: String,
    /// Stationarity tolerance (mgda)
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Comma-separated simplex weights (ws only), e.g. `--w 0.5,0.5`
    #[arg(long = "w")]
    pub weights: Option<String>,
    /// Initial learning rate for the 1/sqrt(t+1) schedule (ws)
    #[arg(long, default_value_t = 0.1)]
    pub lr0: f64,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// Benchmark id
    #[arg(long = "bench")]
    pub bench: String,
    /// Master seed; every random choice flows from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Step size(s) along each tangent direction; comma-separated sweep
    #[arg(long = "s", default_value = "0.1")]
    pub step: String,
    /// Krylov iteration cap(s) for tangent solves; comma-separated sweep
    #[arg(long = "k", default_value = "2")]
    pub krylov: String,
    /// Directions expanded per popped record
    #[arg(long = "K", default_value_t = 1)]
    pub directions: usize,
    /// Output budget: stop once this many records exist
    #[arg(long = "N", default_value_t = 10)]
    pub budget: usize,
    /// Right-hand-side draw: `normal`, `convex`, `coin`, or `one-hot:<task>`
    #[arg(long, default_value = "normal")]
    pub beta: String,
    /// Subtract the stationarity correction from the tangent right-hand side
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub correct: bool,
    /// Stationarity tolerance for (re-)optimization
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Iteration cap for (re-)optimization
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// Worker count; this build always runs the deterministic single worker
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    /// Records CSV file(s); each run id found in them becomes one chain
    #[arg(long = "records", required = true, num_args = 1..)]
    pub records: Vec<PathBuf>,
    /// Crop dominated spans and log stitch points across the chains
    #[arg(long, default_value_t = false)]
    pub stitch: bool,
    /// Number of t-grid samples per chain
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct HvArgs {
    /// Records CSV file(s) whose objective vectors are measured
    #[arg(long = "records", required = true, num_args = 1..)]
    pub records: Vec<PathBuf>,
    /// Reference corner, comma-separated; defaults to the benchmark's corner
    #[arg(long = "ref")]
    pub reference: Option<String>,
    /// `auto`, `exact2d`, `exact3d`, or `mc`
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Sample count for the Monte-Carlo mode
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Seed for the Monte-Carlo mode
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
