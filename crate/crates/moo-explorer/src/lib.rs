//! Front exploration: find one Pareto stationary point, then grow a whole
//! front from it.
//!
//! The pipeline has three layers:
//!
//! 1. [`pareto_optimize_mgda`] descends along the min-norm combined gradient
//!    with a backtracking line search that only accepts steps decreasing
//!    every objective, stopping at a stationarity residual tolerance.
//!    [`weighted_sum_gd`] is the scalarized baseline it is compared against.
//! 2. [`explore`] runs the breadth-first expansion loop: pop a record, solve
//!    for tangent directions (round-robin over target objectives), step
//!    `s` along each oriented direction, re-optimize, and keep the child if
//!    no current record dominates it. Oracle costs are metered separately
//!    for the expand and optimize stages.
//! 3. [`build_chain`] / [`stitch_fronts`] turn record sets into continuous
//!    parametrizations: chains interpolate parameter vectors along an
//!    arc-length knot scale on t ∈ [−1, 1], patches interpolate a center
//!    toward its children under convex weights, and stitching crops
//!    dominated spans where independently grown fronts overlap.

mod explore;
mod optimize;
mod parametrize;

pub use explore::{explore, ExplorationConfig, ExplorationOutcome, StageCosts};
pub use optimize::{pareto_optimize_mgda, weighted_sum_gd, OptimizerChoice};
pub use parametrize::{
    build_chain, build_patch, stitch_fronts, CropSpan, FrontNode, FrontParametrization,
    SampledPoint, StitchPoint, StitchedFront,
};

use moo_core::{CoreError, ParetoRecord};
use moo_expansion::ExpansionError;
use moo_simplex::SimplexError;

#[derive(Debug, thiserror::Error)]
pub enum ExplorerError {
    #[error("invalid exploration configuration: {0}")]
    InvalidConfig(String),
    /// Five consecutive iterations without an accepted line-search step;
    /// carries the best iterate found so far.
    #[error("optimizer stalled at residual {residual:.3e}", residual = .0.residual().unwrap_or(f64::NAN))]
    Stalled(Box<ParetoRecord>),
    /// The scalarized objective grew past 10× its starting value; carries
    /// the trajectory up to and including the diverged point.
    #[error("weighted-sum descent diverged after {} steps", .0.len().saturating_sub(1))]
    Diverged(Vec<ParetoRecord>),
    #[error("records do not form a parent-linked chain: {0}")]
    BrokenChain(String),
    #[error("parametrization query out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}
