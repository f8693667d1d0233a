//! Matrix-free MINRES (Paige & Saunders) for symmetric linear systems.
//!
//! Solves A·v = b where A is given only as an apply callback and may be
//! indefinite or singular; on consistent singular systems the iterates
//! converge to a least-squares/pseudoinverse solution. The Lanczos recurrence
//! plus Givens rotations keeps the residual-norm estimate monotonically
//! non-increasing, which callers rely on for budgeted solves (cap the
//! iteration count, take whatever residual is reached).
//!
//! The solver starts from the zero vector and calls the operator exactly
//! `iterations_used + 1` times: once per iteration plus one final apply to
//! report the true residual of the returned iterate (the in-loop values are
//! recurrence estimates). Exception: b = 0 returns immediately with zero
//! operator calls.

use thiserror::Error;

/// Failure type operators may surface through [`minres`].
pub type OperatorError = Box<dyn std::error::Error + Send + Sync + 'static>;

#[derive(Debug, Error)]
pub enum MinresError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("operator returned length {got}, expected {expected}")]
    OperatorDimension { expected: usize, got: usize },
    #[error("operator failure: {0}")]
    Operator(#[source] OperatorError),
    #[error("preconditioner is not positive definite (r'M⁻¹r = {value:e})")]
    IndefinitePreconditioner { value: f64 },
    #[error("numerical breakdown at iteration {}, last valid iterate retained", report.iterations_used)]
    Breakdown { report: MinresReport },
}

/// Outcome of a MINRES solve.
#[derive(Clone, Debug)]
pub struct MinresReport {
    pub solution: Vec<f64>,
    /// Residual-norm estimates: entry 0 is ‖b‖ (zero iterate), then one per
    /// iteration. Monotonically non-increasing by construction.
    pub residual_history: Vec<f64>,
    pub iterations_used: usize,
    /// Operator applies consumed, including the final verification apply.
    pub operator_calls: usize,
    /// True ‖b − A·solution‖ from the verification apply.
    pub final_residual: f64,
    /// Relative tolerance was met, or the Krylov space was exhausted exactly
    /// (lucky breakdown).
    pub converged: bool,
}

/// MINRES with the identity preconditioner. `apply` must be symmetric (caller
/// contract); `k` caps iterations; `tol` is relative to ‖b‖.
pub fn minres<F>(apply: F, b: &[f64], k: usize, tol: f64) -> Result<MinresReport, MinresError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, OperatorError>,
{
    run(apply, None::<fn(&[f64]) -> Result<Vec<f64>, OperatorError>>, b, k, tol)
}

/// MINRES with a symmetric positive-definite preconditioner M⁻¹ supplied as an
/// apply callback. Residual estimates are then in the M⁻¹ norm.
pub fn minres_preconditioned<F, P>(
    apply: F,
    precond: P,
    b: &[f64],
    k: usize,
    tol: f64,
) -> Result<MinresReport, MinresError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, OperatorError>,
    P: FnMut(&[f64]) -> Result<Vec<f64>, OperatorError>,
{
    run(apply, Some(precond), b, k, tol)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn run<F, P>(
    mut apply: F,
    mut precond: Option<P>,
    b: &[f64],
    k: usize,
    tol: f64,
) -> Result<MinresReport, MinresError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, OperatorError>,
    P: FnMut(&[f64]) -> Result<Vec<f64>, OperatorError>,
{
    if k == 0 {
        return Err(MinresError::InvalidArgument("iteration cap must be ≥ 1".into()));
    }
    if !(tol > 0.0) {
        return Err(MinresError::InvalidArgument(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    let n = b.len();
    let call = |op: &mut F, v: &[f64]| -> Result<Vec<f64>, MinresError> {
        let out = op(v).map_err(MinresError::Operator)?;
        if out.len() != n {
            return Err(MinresError::OperatorDimension { expected: n, got: out.len() });
        }
        Ok(out)
    };

    let mut x = vec![0.0; n];
    let mut history = Vec::with_capacity(k + 1);

    // r1 = b - A·x0 = b
    let mut r1 = b.to_vec();
    let mut y = match precond.as_mut() {
        Some(m) => {
            let z = m(&r1).map_err(MinresError::Operator)?;
            if z.len() != n {
                return Err(MinresError::OperatorDimension { expected: n, got: z.len() });
            }
            z
        }
        None => r1.clone(),
    };
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < 0.0 {
        return Err(MinresError::IndefinitePreconditioner { value: beta1_sq });
    }
    let beta1 = beta1_sq.sqrt();
    if beta1 == 0.0 {
        return Ok(MinresReport {
            solution: x,
            residual_history: vec![0.0],
            iterations_used: 0,
            operator_calls: 0,
            final_residual: 0.0,
            converged: true,
        });
    }
    history.push(beta1);

    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0_f64, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0_f64, 0.0_f64, beta1);
    let (mut cs, mut sn) = (-1.0_f64, 0.0_f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut calls = 0usize;
    let mut iters = 0usize;
    let mut converged = false;

    for itn in 1..=k {
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|yi| s * yi).collect();
        y = call(&mut apply, &v)?;
        calls += 1;
        if itn >= 2 {
            let f = beta / oldb;
            for (yi, r) in y.iter_mut().zip(&r1) {
                *yi -= f * r;
            }
        }
        let alfa = dot(&v, &y);
        let f = alfa / beta;
        for (yi, r) in y.iter_mut().zip(&r2) {
            *yi -= f * r;
        }
        r1 = std::mem::replace(&mut r2, y.clone());
        y = match precond.as_mut() {
            Some(m) => {
                let z = m(&r2).map_err(MinresError::Operator)?;
                if z.len() != n {
                    return Err(MinresError::OperatorDimension { expected: n, got: z.len() });
                }
                z
            }
            None => r2.clone(),
        };
        oldb = beta;
        let beta_sq = dot(&r2, &y);
        if precond.is_some() && beta_sq < -1e-14 * dot(&r2, &r2).max(1.0) {
            return Err(MinresError::IndefinitePreconditioner { value: beta_sq });
        }
        beta = beta_sq.max(0.0).sqrt();

        // previous Givens rotation applied to the new tridiagonal column
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        // next rotation annihilating beta
        let gamma = gbar.hypot(beta).max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        if !(phi.is_finite() && gamma.is_finite() && beta.is_finite()) {
            let final_residual = history.last().copied().unwrap_or(beta1);
            return Err(MinresError::Breakdown {
                report: MinresReport {
                    solution: x,
                    residual_history: history,
                    iterations_used: iters,
                    operator_calls: calls,
                    final_residual,
                    converged: false,
                },
            });
        }

        // shift the two-term w recurrence: w1 ← w_{j-2}, w2 ← w_{j-1}
        let w1 = std::mem::replace(&mut w2, w.clone());
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        iters = itn;
        history.push(phibar);

        if phibar <= tol * beta1 {
            converged = true;
            break;
        }
        if beta <= f64::EPSILON * beta1 {
            // Krylov space exhausted exactly: the iterate solves the system
            // (or its least-squares projection) to working precision.
            converged = true;
            break;
        }
    }

    let ax = call(&mut apply, &x)?;
    calls += 1;
    let final_residual = {
        let mut s = 0.0;
        for i in 0..n {
            let d = b[i] - ax[i];
            s += d * d;
        }
        s.sqrt()
    };

    let report = MinresReport {
        solution: x,
        residual_history: history,
        iterations_used: iters,
        operator_calls: calls,
        final_residual,
        converged,
    };
    if !final_residual.is_finite() {
        // operator misbehaved on the verification apply; iterate is finite
        // but the residual cannot be certified
        return Err(MinresError::Breakdown { report });
    }
    Ok(report)
}

/// Convenience adapter: dense symmetric matrix (row-major, n×n) as operator.
pub fn dense_operator(a: Vec<f64>, n: usize) -> impl FnMut(&[f64]) -> Result<Vec<f64>, OperatorError> {
    move |v: &[f64]| {
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = dot(&a[i * n..(i + 1) * n], v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag_op(d: Vec<f64>) -> impl FnMut(&[f64]) -> Result<Vec<f64>, OperatorError> {
        move |v: &[f64]| Ok(v.iter().zip(&d).map(|(x, di)| x * di).collect())
    }

    fn assert_monotone(h: &[f64]) {
        for win in h.windows(2) {
            assert!(
                win[1] <= win[0] + 1e-12 * h[0].max(1.0),
                "residual history must be non-increasing: {h:?}"
            );
        }
    }

    #[test]
    fn identity_converges_in_one_iteration() {
        let rep = minres(diag_op(vec![1.0, 1.0]), &[3.0, 4.0], 10, 1e-10).unwrap();
        assert_eq!(rep.iterations_used, 1);
        assert!(rep.converged);
        assert_relative_eq!(rep.solution[0], 3.0, max_relative = 1e-12);
        assert_relative_eq!(rep.solution[1], 4.0, max_relative = 1e-12);
        assert!(rep.final_residual <= 1e-12);
        assert_eq!(rep.operator_calls, rep.iterations_used + 1);
        assert_monotone(&rep.residual_history);
    }

    #[test]
    fn diagonal_indefinite_small_system() {
        let rep = minres(diag_op(vec![1.0, 2.0, 3.0]), &[1.0, 1.0, 1.0], 3, 1e-12).unwrap();
        assert_relative_eq!(rep.solution[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(rep.solution[1], 0.5, epsilon = 1e-10);
        assert_relative_eq!(rep.solution[2], 1.0 / 3.0, epsilon = 1e-10);
        assert_eq!(rep.operator_calls, rep.iterations_used + 1);
        assert_monotone(&rep.residual_history);
    }

    #[test]
    fn consistent_singular_system() {
        // A = diag(1, 0), b = (1, 0): pseudoinverse solution (1, 0)
        let rep = minres(diag_op(vec![1.0, 0.0]), &[1.0, 0.0], 2, 1e-12).unwrap();
        assert!(rep.converged);
        assert_relative_eq!(rep.solution[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(rep.solution[1], 0.0, epsilon = 1e-12);
        assert!(rep.final_residual <= 1e-12);
        assert_monotone(&rep.residual_history);
    }

    #[test]
    fn zero_rhs_returns_zero_without_operator_calls() {
        let mut calls = 0;
        let rep = minres(
            |v: &[f64]| {
                calls += 1;
                Ok(v.to_vec())
            },
            &[0.0, 0.0, 0.0],
            5,
            1e-10,
        )
        .unwrap();
        assert_eq!(calls, 0);
        assert_eq!(rep.iterations_used, 0);
        assert_eq!(rep.solution, vec![0.0; 3]);
        assert!(rep.converged);
    }

    #[test]
    fn capped_iterations_return_best_krylov_iterate() {
        // one iteration = best multiple of b; check against the closed form
        let a = vec![2.0, 1.0, 0.0, 1.0, -3.0, 1.0, 0.0, 1.0, 1.0];
        let b = [1.0, 2.0, -1.0];
        let rep = minres(dense_operator(a.clone(), 3), &b, 1, 1e-14).unwrap();
        let mut op = dense_operator(a, 3);
        let ab = op(&b).unwrap();
        let scale = dot(&b, &ab) / dot(&ab, &ab);
        let best: Vec<f64> = b.iter().map(|x| scale * x).collect();
        let abest = op(&best).unwrap();
        let best_res = b
            .iter()
            .zip(&abest)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(
            rep.final_residual <= best_res + 1e-10,
            "one MINRES step ({}) must not lose to the best scaled-b guess ({best_res})",
            rep.final_residual
        );
        assert_eq!(rep.iterations_used, 1);
        assert_eq!(rep.operator_calls, 2);
    }

    #[test]
    fn estimates_match_true_residual_at_exit() {
        let a = vec![4.0, 1.0, -2.0, 1.0, -1.0, 0.5, -2.0, 0.5, 3.0];
        let rep = minres(dense_operator(a, 3), &[1.0, -2.0, 0.5], 3, 1e-12).unwrap();
        let est = *rep.residual_history.last().unwrap();
        assert!(
            (est - rep.final_residual).abs() <= 1e-8 * rep.residual_history[0],
            "estimate {est} vs true {}",
            rep.final_residual
        );
    }

    #[test]
    fn operator_error_is_propagated() {
        let res = minres(
            |_v: &[f64]| Err::<Vec<f64>, OperatorError>("tape overflow".into()),
            &[1.0, 2.0],
            3,
            1e-8,
        );
        assert!(matches!(res, Err(MinresError::Operator(_))));
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let res = minres(|_v: &[f64]| Ok(vec![1.0]), &[1.0, 2.0], 3, 1e-8);
        assert!(matches!(res, Err(MinresError::OperatorDimension { expected: 2, got: 1 })));
    }

    #[test]
    fn nan_recurrence_is_breakdown_with_last_iterate() {
        // diag(1, 2, 3) needs three iterations; poison the operator after the
        // first so the Lanczos recurrence itself goes non-finite
        let mut count = 0;
        let res = minres(
            move |v: &[f64]| {
                count += 1;
                if count >= 2 {
                    Ok(vec![f64::NAN; v.len()])
                } else {
                    Ok(vec![v[0], 2.0 * v[1], 3.0 * v[2]])
                }
            },
            &[1.0, 1.0, 1.0],
            5,
            1e-14,
        );
        match res {
            Err(MinresError::Breakdown { report }) => {
                assert!(report.solution.iter().all(|x| x.is_finite()));
            }
            other => panic!("expected breakdown, got {other:?}"),
        }
    }

    #[test]
    fn nan_on_verification_apply_is_breakdown() {
        let mut count = 0;
        let res = minres(
            move |v: &[f64]| {
                count += 1;
                if count >= 2 {
                    Ok(vec![f64::NAN; v.len()])
                } else {
                    Ok(v.to_vec())
                }
            },
            &[1.0, 2.0],
            5,
            1e-14,
        );
        match res {
            Err(MinresError::Breakdown { report }) => {
                assert!(report.solution.iter().all(|x| x.is_finite()));
                assert!(!report.final_residual.is_finite());
            }
            other => panic!("expected breakdown, got {other:?}"),
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(minres(diag_op(vec![1.0]), &[1.0], 0, 1e-8).is_err());
        assert!(minres(diag_op(vec![1.0]), &[1.0], 3, 0.0).is_err());
    }

    #[test]
    fn spd_preconditioner_preserves_solution() {
        let a = vec![4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 2.0];
        let b = [1.0, 0.0, -2.0];
        let plain = minres(dense_operator(a.clone(), 3), &b, 30, 1e-12).unwrap();
        // Jacobi preconditioner M⁻¹ = diag(1/4, 1/3, 1/2)
        let pre = minres_preconditioned(
            dense_operator(a, 3),
            |v: &[f64]| Ok(vec![v[0] / 4.0, v[1] / 3.0, v[2] / 2.0]),
            &b,
            30,
            1e-12,
        )
        .unwrap();
        for (p, q) in plain.solution.iter().zip(&pre.solution) {
            assert_relative_eq!(p, q, epsilon = 1e-8);
        }
        assert!(pre.final_residual <= 1e-8);
        assert_monotone(&pre.residual_history);
    }

    #[test]
    fn indefinite_preconditioner_rejected() {
        let res = minres_preconditioned(
            diag_op(vec![1.0, 1.0]),
            |v: &[f64]| Ok(vec![-v[0], -v[1]]),
            &[1.0, 1.0],
            5,
            1e-8,
        );
        assert!(matches!(res, Err(MinresError::IndefinitePreconditioner { .. })));
    }
}
