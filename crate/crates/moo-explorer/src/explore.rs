//! Breadth-first front exploration: optimize a seed, then repeatedly pop a
//! record, step along oriented tangent directions, re-optimize each child,
//! and keep it when nothing found so far dominates it.
//!
//! The loop is deliberately sequential: expanding queue nodes in parallel
//! would reorder β draws and break bitwise reproducibility, which the run
//! artifacts depend on.

use std::collections::VecDeque;

use moo_core::{
    dominates, nondominated_filter, AlphaResult, CostSnapshot, GradientMatrix, ParamVector,
    ParetoRecord, ProblemHandle, Stage,
};
use moo_expansion::{expand_direction_resampled, orient_direction, BetaStrategy};
use moo_simplex::min_norm_alpha;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optimize::run_optimizer;
use crate::{ExplorerError, OptimizerChoice};

/// Knobs for one exploration run. Step size and solver cap control each
/// tangent move; the budget caps the total record count.
#[derive(Clone, Debug)]
pub struct ExplorationConfig {
    /// Distance s travelled along each unit tangent direction.
    pub step_size: f64,
    /// Krylov iteration cap k for each tangent solve.
    pub minres_cap: usize,
    /// Directions K expanded per popped record; targets round-robin the
    /// objectives, with a fresh β draw per direction.
    pub directions_per_node: usize,
    /// Output budget N: exploration stops once this many records exist.
    pub budget: usize,
    pub beta_strategy: BetaStrategy,
    /// Subtract the stationarity correction from the tangent right-hand
    /// side (matters when re-optimization stops short of exact stationarity).
    pub use_correction: bool,
    pub optimizer: OptimizerChoice,
    pub rng_seed: u64,
}

impl Default for ExplorationConfig {
    fn default() -> Self {
        ExplorationConfig {
            step_size: 0.1,
            minres_cap: 2,
            directions_per_node: 1,
            budget: 10,
            beta_strategy: BetaStrategy::StandardNormal,
            use_correction: true,
            optimizer: OptimizerChoice::default(),
            rng_seed: 0,
        }
    }
}

impl ExplorationConfig {
    pub fn validate(&self) -> Result<(), ExplorerError> {
        if !self.step_size.is_finite() || self.step_size <= 0.0 {
            return Err(ExplorerError::InvalidConfig(format!(
                "step size must be positive and finite, got {}",
                self.step_size
            )));
        }
        if self.minres_cap == 0 {
            return Err(ExplorerError::InvalidConfig(
                "tangent solver cap must be at least 1".into(),
            ));
        }
        if self.directions_per_node == 0 {
            return Err(ExplorerError::InvalidConfig(
                "directions per node must be at least 1".into(),
            ));
        }
        if self.budget == 0 {
            return Err(ExplorerError::InvalidConfig(
                "record budget must be at least 1".into(),
            ));
        }
        match &self.optimizer {
            OptimizerChoice::MgdaLineSearch { tol, max_iters } => {
                if !(*tol > 0.0) {
                    return Err(ExplorerError::InvalidConfig(format!(
                        "stationarity tolerance must be positive, got {tol}"
                    )));
                }
                if *max_iters == 0 {
                    return Err(ExplorerError::InvalidConfig(
                        "optimizer iteration cap must be at least 1".into(),
                    ));
                }
            }
            OptimizerChoice::WeightedSumGd { weights, lr0, iters } => {
                if !(*lr0 > 0.0) {
                    return Err(ExplorerError::InvalidConfig(format!(
                        "learning rate must be positive, got {lr0}"
                    )));
                }
                if *iters == 0 {
                    return Err(ExplorerError::InvalidConfig(
                        "optimizer iteration count must be at least 1".into(),
                    ));
                }
                let sum: f64 = weights.iter().sum();
                if weights.iter().any(|&w| !w.is_finite() || w < -1e-12)
                    || (sum - 1.0).abs() > 1e-9
                {
                    return Err(ExplorerError::InvalidConfig(format!(
                        "weights {weights:?} are not on the unit simplex"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Oracle-call tallies split by pipeline stage, so tangent-solve cost and
/// re-optimization cost can be compared independently.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCosts {
    pub optimize: CostSnapshot,
    pub expand: CostSnapshot,
}

impl StageCosts {
    pub fn total(&self) -> CostSnapshot {
        self.optimize + self.expand
    }
}

/// Everything one exploration run produces: the raw record list in append
/// order, the indices surviving a final global dominance pass, per-stage
/// costs, and any non-fatal incidents.
#[derive(Clone, Debug)]
pub struct ExplorationOutcome {
    /// Breadth-first output; the online guard only blocks children dominated
    /// at append time, so later records may retroactively dominate earlier
    /// ones (see `filtered`).
    pub records: Vec<ParetoRecord>,
    /// Indices into `records` that survive the final dominance filter.
    pub filtered: Vec<usize>,
    pub costs: StageCosts,
    /// True when the queue emptied before the budget was met.
    pub partial: bool,
    pub warnings: Vec<String>,
}

impl ExplorationOutcome {
    pub fn filtered_records(&self) -> Vec<&ParetoRecord> {
        self.filtered.iter().map(|&i| &self.records[i]).collect()
    }
}

/// Grow a set of Pareto stationary records from one starting point.
///
/// The seed is optimized first (stage `seed`, id 0); every accepted child is
/// appended with the next sequential id, its parent's id, and stage
/// `expanded`, then queued for its own expansion. Failed tangent solves,
/// stalled re-optimizations, and dominated children are logged as warnings
/// and skipped. An exhausted queue marks the outcome partial instead of
/// erroring.
pub fn explore(
    problem: &ProblemHandle,
    x0: &ParamVector,
    config: &ExplorationConfig,
) -> Result<ExplorationOutcome, ExplorerError> {
    config.validate()?;
    let m = problem.m();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut costs = StageCosts::default();
    let mut warnings = Vec::new();

    let before = problem.snapshot();
    let mut seed = run_optimizer(problem, x0, &config.optimizer)?;
    costs.optimize = costs.optimize + (problem.snapshot() - before);
    seed.id = 0;
    seed.parent_id = None;
    seed.stage = Stage::Seed;

    let mut records = vec![seed];
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    let mut partial = false;

    'grow: while records.len() < config.budget {
        let Some(node_idx) = queue.pop_front() else {
            partial = true;
            warnings.push(format!(
                "queue exhausted with {} of {} records",
                records.len(),
                config.budget
            ));
            break;
        };
        for direction in 0..config.directions_per_node {
            if records.len() >= config.budget {
                break 'grow;
            }
            let target = direction % m;

            let before = problem.snapshot();
            let stepped =
                step_along_tangent(problem, &mut records[node_idx], config, target, &mut rng);
            costs.expand = costs.expand + (problem.snapshot() - before);
            let child_x = match stepped {
                Ok(x) => x,
                Err(e) => {
                    warnings.push(format!(
                        "record {} direction {direction}: expansion skipped ({e})",
                        records[node_idx].id
                    ));
                    continue;
                }
            };

            let before = problem.snapshot();
            let optimized = run_optimizer(problem, &child_x, &config.optimizer);
            costs.optimize = costs.optimize + (problem.snapshot() - before);
            let mut child = match optimized {
                Ok(rec) => rec,
                Err(ExplorerError::Stalled(rec)) => {
                    warnings.push(format!(
                        "record {} direction {direction}: re-optimization stalled at \
                         residual {:.3e}; child dropped",
                        records[node_idx].id,
                        rec.residual().unwrap_or(f64::NAN)
                    ));
                    continue;
                }
                Err(ExplorerError::Diverged(trajectory)) => {
                    warnings.push(format!(
                        "record {} direction {direction}: re-optimization diverged after \
                         {} steps; child dropped",
                        records[node_idx].id,
                        trajectory.len().saturating_sub(1)
                    ));
                    continue;
                }
                Err(e) => return Err(e),
            };

            let mut child_is_dominated = false;
            for existing in &records {
                if dominates(&existing.f, &child.f)? {
                    child_is_dominated = true;
                    break;
                }
            }
            if child_is_dominated {
                warnings.push(format!(
                    "record {} direction {direction}: child dominated by current output; dropped",
                    records[node_idx].id
                ));
                continue;
            }

            child.id = records.len() as u64;
            child.parent_id = Some(records[node_idx].id);
            child.stage = Stage::Expanded;
            records.push(child);
            queue.push_back(records.len() - 1);
        }
    }

    let objective_values: Vec<_> = records.iter().map(|r| r.f.clone()).collect();
    let filtered = nondominated_filter(&objective_values)?;

    Ok(ExplorationOutcome {
        records,
        filtered,
        costs,
        partial,
        warnings,
    })
}

/// Solve for one tangent direction at `node`, orient it against the target
/// objective using the node's stored gradients, and take the configured step.
fn step_along_tangent(
    problem: &ProblemHandle,
    node: &mut ParetoRecord,
    config: &ExplorationConfig,
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ParamVector, ExplorerError> {
    let (grads, alpha) = node_grads_alpha(problem, node)?;
    let direction = expand_direction_resampled(
        problem,
        &node.x,
        &alpha,
        config.beta_strategy,
        config.minres_cap,
        config.use_correction,
        rng,
    )?;
    let oriented = orient_direction(&direction, &grads, target);
    Ok(node.x.add_scaled(config.step_size, &oriented.v))
}

/// Fetch the node's gradients and simplex weights, recomputing and
/// backfilling whatever the record does not carry (weighted-sum baselines
/// store neither; oversized problems skip gradient storage).
fn node_grads_alpha(
    problem: &ProblemHandle,
    node: &mut ParetoRecord,
) -> Result<(GradientMatrix, AlphaResult), ExplorerError> {
    let grads = match &node.grads {
        Some(g) => g.clone(),
        None => {
            let g = problem.gradients(&node.x)?;
            if g.m() * g.n() <= ParetoRecord::GRADIENT_STORAGE_CAP {
                node.grads = Some(g.clone());
            }
            g
        }
    };
    let alpha = match &node.alpha {
        Some(a) => a.clone(),
        None => {
            let a = min_norm_alpha(&grads)?;
            node.alpha = Some(a.clone());
            a
        }
    };
    Ok((grads, alpha))
}
