//! Command-line front end for the multi-objective exploration toolkit.
//!
//! One binary, `moo`, with four subcommands covering the whole pipeline:
//!
//! - `optimize` — drive a seeded start point to a Pareto-stationary record
//!   (min-norm descent) or to a scalarized optimum (weighted sum).
//! - `explore` — run a full tangent-expansion campaign, with comma-separated
//!   sweeps over the step size `--s` and Krylov cap `--k`.
//! - `front` — rebuild chains from records files, sample them on a t-grid,
//!   and optionally stitch overlapping chains into one cropped front.
//! - `hv` — measure the hypervolume of the objective vectors in records
//!   files against an explicit or benchmark-default reference corner.
//!
//! Every run lands in its own directory under the output root (`MOO_OUT_DIR`
//! env var > `--out` flag > `./moo-runs`), with a `manifest.json` written
//! before any data so interrupted runs stay diagnosable. Exit codes: 0 on
//! success, 1 on numeric failures (stall, divergence), 2 on usage or
//! validation problems.

pub mod args;
mod commands;
pub mod manifest;
pub mod tables;

pub use args::{Cli, Command, ExploreArgs, FrontArgs, HvArgs, OptimizeArgs};

/// A failed command, split by exit-code policy: usage and validation
/// problems exit 2, runtime and numeric failures exit 1.
#[derive(Debug)]
pub enum CliFailure {
    Usage(String),
    Runtime(String),
}

impl CliFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliFailure::Usage(_) => 2,
            CliFailure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliFailure::Usage(msg) | CliFailure::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliFailure {}

/// Dispatches a parsed invocation to its command.
pub fn run(cli: Cli) -> Result<(), CliFailure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Optimize(args) => commands::cmd_optimize(args, out),
        Command::Explore(args) => commands::cmd_explore(args, out),
        Command::Front(args) => commands::cmd_front(args, out),
        Command::Hv(args) => commands::cmd_hv(args, out),
    }
}
