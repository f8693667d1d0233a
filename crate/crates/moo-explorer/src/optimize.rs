//! Single-point optimizers: multiple-gradient descent with a dominance-safe
//! line search, and the scalarized weighted-sum baseline it is judged against.

use moo_core::{
    GradientMatrix, ObjectiveValues, ParamVector, ParetoRecord, ProblemHandle, Stage,
};
use moo_simplex::min_norm_alpha;

use crate::ExplorerError;

/// Smallest accepted line-search step; decaying past this counts as a failed
/// outer iteration.
const MIN_STEP: f64 = 1e-10;

/// Geometric decay applied to the trial step after each rejection.
const STEP_DECAY: f64 = 0.9;

/// Armijo sufficient-decrease coefficient. The min-norm direction d
/// guarantees ∇fᵢ·d ≥ ‖d‖² for every objective, so each trial must beat
/// fᵢ − c₁·η·‖d‖². Plain non-increase would not do: a unit step on a
/// quadratic reflects x through the combined center, leaving every
/// objective exactly equal, and the iteration orbits without progress.
const ARMIJO_C: f64 = 1e-4;

/// Failed outer iterations in a row before the optimizer gives up.
const STALL_LIMIT: usize = 5;

/// Which single-point optimizer the exploration loop re-optimizes with.
#[derive(Clone, Debug, PartialEq)]
pub enum OptimizerChoice {
    /// Descend along the min-norm combined gradient until the stationarity
    /// residual drops below `tol` or `max_iters` passes run out.
    MgdaLineSearch { tol: f64, max_iters: usize },
    /// Plain gradient descent on Σ wᵢ·fᵢ with an lr₀/√(t+1) schedule.
    WeightedSumGd {
        weights: Vec<f64>,
        lr0: f64,
        iters: usize,
    },
}

impl Default for OptimizerChoice {
    fn default() -> Self {
        OptimizerChoice::MgdaLineSearch {
            tol: 1e-6,
            max_iters: 200,
        }
    }
}

fn make_record(
    x: ParamVector,
    f: ObjectiveValues,
    grads: GradientMatrix,
    alpha: moo_core::AlphaResult,
) -> ParetoRecord {
    let grads = if grads.m() * grads.n() <= ParetoRecord::GRADIENT_STORAGE_CAP {
        Some(grads)
    } else {
        None
    };
    ParetoRecord {
        id: 0,
        x,
        f,
        grads,
        alpha: Some(alpha),
        parent_id: None,
        stage: Stage::Optimized,
    }
}

/// Drive `x` to a Pareto stationary point: repeatedly solve the min-norm
/// simplex problem over the current gradients and step against the combined
/// direction, with a backtracking line search that only accepts trials
/// making a small sufficient decrease in every objective at once (so each
/// accepted step strictly dominates its predecessor).
///
/// Returns when the stationarity residual ‖Σ αᵢ∇fᵢ‖ drops to `tol` or after
/// `max_iters` outer iterations (whichever comes first); the record carries
/// the final gradients and simplex weights. If the line search fails to make
/// any progress for five consecutive iterations the stalled error carries the
/// best iterate reached so far.
pub fn pareto_optimize_mgda(
    problem: &ProblemHandle,
    x0: &ParamVector,
    tol: f64,
    max_iters: usize,
) -> Result<ParetoRecord, ExplorerError> {
    if !(tol > 0.0) {
        return Err(ExplorerError::InvalidConfig(format!(
            "stationarity tolerance must be positive, got {tol}"
        )));
    }
    let mut x = x0.clone();
    let mut f = problem.evaluate(&x)?;
    let mut stall_streak = 0usize;

    for _ in 0..max_iters {
        let grads = problem.gradients(&x)?;
        let alpha = min_norm_alpha(&grads)?;
        if alpha.min_norm_value <= tol {
            return Ok(make_record(x, f, grads, alpha));
        }

        // Backtrack from a unit step until every objective drops by the
        // Armijo margin for the common descent rate ‖d‖².
        let d = alpha.combined.clone();
        let descent_rate = alpha.min_norm_value * alpha.min_norm_value;
        let mut eta = 1.0;
        let mut accepted = None;
        while eta >= MIN_STEP {
            let trial = x.add_scaled(-eta, &d);
            let trial_f = problem.evaluate(&trial)?;
            let margin = ARMIJO_C * eta * descent_rate;
            let all_sufficiently_decreased = trial_f
                .as_slice()
                .iter()
                .zip(f.as_slice())
                .all(|(new, old)| *new <= *old - margin);
            if all_sufficiently_decreased {
                accepted = Some((trial, trial_f));
                break;
            }
            eta *= STEP_DECAY;
        }

        match accepted {
            Some((trial, trial_f)) => {
                x = trial;
                f = trial_f;
                stall_streak = 0;
            }
            None => {
                stall_streak += 1;
                if stall_streak >= STALL_LIMIT {
                    return Err(ExplorerError::Stalled(Box::new(make_record(
                        x, f, grads, alpha,
                    ))));
                }
            }
        }
    }

    // Iteration budget exhausted: report the final iterate with fresh
    // gradients so the record's residual matches its x.
    let grads = problem.gradients(&x)?;
    let alpha = min_norm_alpha(&grads)?;
    Ok(make_record(x, f, grads, alpha))
}

/// Gradient descent on the scalarized objective Σ wᵢ·fᵢ with step
/// lr₀/√(t+1), returning the full trajectory (one record per iterate,
/// parent-linked in order). The baseline deliberately records objective
/// values only — no gradients or simplex weights are attached.
///
/// If the scalarized objective grows past ten times its starting magnitude
/// the divergence error carries the trajectory up to and including the
/// diverged iterate.
pub fn weighted_sum_gd(
    problem: &ProblemHandle,
    x0: &ParamVector,
    weights: &[f64],
    lr0: f64,
    iters: usize,
) -> Result<Vec<ParetoRecord>, ExplorerError> {
    check_simplex_weights(weights, problem.m())?;
    if !(lr0 > 0.0) {
        return Err(ExplorerError::InvalidConfig(format!(
            "learning rate must be positive, got {lr0}"
        )));
    }

    let mut x = x0.clone();
    let mut f = problem.evaluate(&x)?;
    let scalarize = |f: &ObjectiveValues| -> f64 {
        weights.iter().zip(f.as_slice()).map(|(w, v)| w * v).sum()
    };
    let start = scalarize(&f);
    let divergence_limit = 10.0 * start.abs().max(f64::MIN_POSITIVE);

    let mut trajectory = vec![ParetoRecord {
        id: 0,
        x: x.clone(),
        f: f.clone(),
        grads: None,
        alpha: None,
        parent_id: None,
        stage: Stage::Optimized,
    }];

    for t in 0..iters {
        let grads = problem.gradients(&x)?;
        let d = grads.combine(weights)?;
        let lr = lr0 / ((t + 1) as f64).sqrt();
        x = x.add_scaled(-lr, &d);
        f = problem.evaluate(&x)?;
        trajectory.push(ParetoRecord {
            id: (t + 1) as u64,
            x: x.clone(),
            f: f.clone(),
            grads: None,
            alpha: None,
            parent_id: Some(t as u64),
            stage: Stage::Optimized,
        });
        if scalarize(&f) > divergence_limit {
            return Err(ExplorerError::Diverged(trajectory));
        }
    }
    Ok(trajectory)
}

fn check_simplex_weights(weights: &[f64], m: usize) -> Result<(), ExplorerError> {
    if weights.len() != m {
        return Err(ExplorerError::InvalidConfig(format!(
            "{} weights supplied for {m} objectives",
            weights.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !w.is_finite() || w < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(ExplorerError::InvalidConfig(format!(
            "weights {weights:?} are not on the unit simplex"
        )));
    }
    Ok(())
}

/// Run whichever optimizer the config selects and reduce it to one record
/// (the last trajectory point for the weighted-sum baseline).
pub(crate) fn run_optimizer(
    problem: &ProblemHandle,
    x0: &ParamVector,
    choice: &OptimizerChoice,
) -> Result<ParetoRecord, ExplorerError> {
    match choice {
        OptimizerChoice::MgdaLineSearch { tol, max_iters } => {
            pareto_optimize_mgda(problem, x0, *tol, *max_iters)
        }
        OptimizerChoice::WeightedSumGd { weights, lr0, iters } => {
            let trajectory = weighted_sum_gd(problem, x0, weights, *lr0, *iters)?;
            Ok(trajectory
                .into_iter()
                .last()
                .expect("trajectory always contains the start point"))
        }
    }
}
