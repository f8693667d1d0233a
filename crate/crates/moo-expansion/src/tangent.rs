use moo_core::{AlphaResult, GradientMatrix, ObjectiveValues, ParamVector, ProblemHandle};
use moo_minres::{minres, OperatorError};
use rand::Rng;

use crate::{BetaSample, BetaStrategy, ExpansionError};

/// Resample budget for degenerate β draws before the error surfaces.
pub const RESAMPLE_LIMIT: usize = 8;

/// MINRES tolerance used for tangent solves: small enough that the solver
/// always runs to its iteration cap (stopping early only on exact
/// convergence), which keeps the oracle cost of an expansion exactly
/// m·(k + 1) Hessian applies.
const RUN_TO_CAP_TOL: f64 = 1e-300;

/// Sign state of a tangent direction relative to a target objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// As returned by the solver; sign not yet meaningful.
    Raw,
    /// Already decreased the target objective to first order.
    Kept,
    /// Sign was flipped to decrease the target objective.
    Flipped,
    /// Predicted change ≤ 1e−12 in magnitude; sign left alone.
    Neutral,
}

/// Unit-norm direction predicted to slide along the Pareto set.
#[derive(Clone, Debug)]
pub struct TangentDirection {
    pub v: ParamVector,
    /// Final MINRES residual of the sampled system.
    pub residual: f64,
    pub beta_used: BetaSample,
    pub corrected: bool,
    pub orientation: Orientation,
}

/// Solve H(x)v = (∇fᵀ − c·1ᵀ)β for a tangent candidate and normalize it.
///
/// Costs one gradient set plus m·(MINRES operator calls) Hessian applies on
/// the problem's meters. With `use_correction` off the right-hand side is
/// plain ∇fᵀβ, which the larger experiments favor; correction matters when
/// x is only approximately stationary.
pub fn expand_direction(
    problem: &ProblemHandle,
    x: &ParamVector,
    alpha: &AlphaResult,
    beta: &BetaSample,
    k: usize,
    use_correction: bool,
) -> Result<TangentDirection, ExpansionError> {
    let m = problem.m();
    if beta.beta.len() != m {
        return Err(ExpansionError::InvalidArgument(format!(
            "β has {} entries for m = {m}",
            beta.beta.len()
        )));
    }
    if alpha.alpha.len() != m {
        return Err(ExpansionError::InvalidArgument(format!(
            "α has {} entries for m = {m}",
            alpha.alpha.len()
        )));
    }
    if use_correction && alpha.combined.len() != problem.n() {
        return Err(ExpansionError::InvalidArgument(format!(
            "correction vector has {} entries for n = {}",
            alpha.combined.len(),
            problem.n()
        )));
    }
    let grads = problem.gradients(x)?;

    let n = problem.n();
    let mut rhs = vec![0.0; n];
    let beta_sum: f64 = beta.beta.iter().sum();
    for (i, r) in rhs.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, &b) in beta.beta.iter().enumerate() {
            acc += b * grads.row(t)[i];
        }
        if use_correction {
            acc -= beta_sum * alpha.combined[i];
        }
        *r = acc;
    }

    let grad_scale = grads.data().iter().map(|g| g * g).sum::<f64>().sqrt();
    let rhs_norm = rhs.iter().map(|r| r * r).sum::<f64>().sqrt();
    if rhs_norm <= 1e-14 * grad_scale {
        return Err(ExpansionError::DegenerateSample { rhs_norm, grad_scale });
    }

    let apply = |v: &[f64]| -> Result<Vec<f64>, OperatorError> {
        problem
            .hvp(x, &alpha.alpha, &ParamVector::new(v.to_vec()))
            .map(|hv| hv.0)
            .map_err(|e| Box::new(e) as OperatorError)
    };
    let report = minres(apply, &rhs, k, RUN_TO_CAP_TOL)?;

    let norm = report.solution.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-14 * rhs_norm.max(1.0) {
        return Err(ExpansionError::DegenerateSample {
            rhs_norm: norm,
            grad_scale,
        });
    }
    let v = ParamVector::new(report.solution.iter().map(|vi| vi / norm).collect());
    Ok(TangentDirection {
        v,
        residual: report.final_residual,
        beta_used: beta.clone(),
        corrected: use_correction,
        orientation: Orientation::Raw,
    })
}

/// [`expand_direction`] with automatic β redraws: degenerate samples are
/// retried up to [`RESAMPLE_LIMIT`] times before the error surfaces.
pub fn expand_direction_resampled<R: Rng + ?Sized>(
    problem: &ProblemHandle,
    x: &ParamVector,
    alpha: &AlphaResult,
    strategy: BetaStrategy,
    k: usize,
    use_correction: bool,
    rng: &mut R,
) -> Result<TangentDirection, ExpansionError> {
    let mut last = None;
    for _ in 0..RESAMPLE_LIMIT {
        let beta = BetaSample::draw(strategy, problem.m(), rng)?;
        match expand_direction(problem, x, alpha, &beta, k, use_correction) {
            Err(e @ ExpansionError::DegenerateSample { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("loop ran at least once"))
}

/// Flip v so its first-order prediction decreases the target objective.
/// Predictions with magnitude ≤ 1e−12 leave the sign alone (neutral), which
/// makes the operation idempotent.
pub fn orient_direction(
    dir: &TangentDirection,
    grads: &GradientMatrix,
    target_task: usize,
) -> TangentDirection {
    assert!(target_task < grads.m(), "target objective out of range");
    let predicted: f64 = grads
        .row(target_task)
        .iter()
        .zip(dir.v.as_slice())
        .map(|(g, v)| g * v)
        .sum();
    let mut out = dir.clone();
    if predicted.abs() <= 1e-12 {
        out.orientation = Orientation::Neutral;
    } else if predicted > 0.0 {
        out.v = dir.v.scaled(-1.0);
        out.orientation = Orientation::Flipped;
    } else {
        out.orientation = Orientation::Kept;
    }
    out
}

/// First-order objective change for a step of size s along v: s·∇f(x)v.
pub fn predict_delta_f(grads: &GradientMatrix, v: &ParamVector, s: f64) -> ObjectiveValues {
    let dirs = grads.apply(v.as_slice()).expect("direction dimension");
    ObjectiveValues::new(dirs.into_iter().map(|d| s * d).collect())
}
