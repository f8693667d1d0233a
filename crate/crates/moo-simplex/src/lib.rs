//! Min-norm convex combinations of task gradients.
//!
//! The stationarity measure used throughout the workspace is the norm of the
//! shortest vector in the convex hull of the gradients: min over simplex
//! weights α of ‖Σ αᵢ∇fᵢ‖. A point is Pareto stationary exactly when that
//! minimum is zero; the minimizing combination is the common descent
//! direction used by the MGDA optimizer, and the correction vector c = ∇fᵀα
//! shifts all gradients so a near-stationary point becomes exactly stationary.
//!
//! m = 2 has a closed form (clipped projection onto the segment between the
//! two gradients); m ≥ 3 runs Frank–Wolfe with away steps on the m-dimensional
//! quadratic, which converges linearly on this problem.

use moo_core::{AlphaResult, GradientMatrix, ParamVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("need at least two objectives, got {0}")]
    TooFewObjectives(usize),
    #[error("gradient matrix contains non-finite entries")]
    NonFinite,
    #[error(
        "Frank-Wolfe stopped at duality gap {gap:e} after {iters} iterations (tolerance {tol:e})"
    )]
    NoConvergence {
        gap: f64,
        iters: usize,
        tol: f64,
        best: AlphaResult,
    },
}

/// Simplex weights plus the minimal gradient modification c = ∇fᵀα that makes
/// the point exactly stationary (the corrected gradients gᵢ − c admit α as an
/// exact zero combination).
#[derive(Clone, Debug)]
pub struct CorrectionResult {
    pub alpha: AlphaResult,
    pub c: ParamVector,
}

const FW_TOL: f64 = 1e-10;
const FW_MAX_ITERS: usize = 10_000;

/// KKT-optimal weights for min over the simplex of ‖Σ αᵢ gᵢ‖₂.
pub fn min_norm_alpha(grads: &GradientMatrix) -> Result<AlphaResult, SimplexError> {
    let m = grads.m();
    if m < 2 {
        return Err(SimplexError::TooFewObjectives(m));
    }
    if !grads.is_finite() {
        return Err(SimplexError::NonFinite);
    }
    if m == 2 {
        return Ok(two_task_closed_form(grads));
    }
    frank_wolfe(grads)
}

/// Weights from [`min_norm_alpha`] plus the closed-form correction c = ∇fᵀα.
pub fn corrected_alpha(grads: &GradientMatrix) -> Result<CorrectionResult, SimplexError> {
    let alpha = min_norm_alpha(grads)?;
    let c = alpha.combined.clone();
    Ok(CorrectionResult { alpha, c })
}

/// ‖Σ αᵢ∇fᵢ‖ at the optimal α; zero iff the point is Pareto stationary.
pub fn stationarity_residual(grads: &GradientMatrix) -> Result<f64, SimplexError> {
    Ok(min_norm_alpha(grads)?.min_norm_value)
}

fn finish(grads: &GradientMatrix, alpha: Vec<f64>) -> AlphaResult {
    let combined = grads.combine(&alpha).expect("alpha length checked");
    let min_norm_value = combined.norm();
    AlphaResult {
        alpha,
        min_norm_value,
        combined,
    }
}

/// min over t ∈ [0,1] of ‖t·g1 + (1−t)·g2‖: projection of the origin onto the
/// segment [g2, g1], clipped to the endpoints.
fn two_task_closed_form(grads: &GradientMatrix) -> AlphaResult {
    let g1 = grads.row(0);
    let g2 = grads.row(1);
    let mut den = 0.0;
    let mut num = 0.0;
    for (a, b) in g1.iter().zip(g2) {
        let d = a - b;
        den += d * d;
        num += (b - a) * b;
    }
    // α₁ = (g2 − g1)·g2 / ‖g1 − g2‖², clipped to the simplex; identical
    // gradients (den = 0) tie-break to uniform weights
    let alpha1 = if den == 0.0 { 0.5 } else { (num / den).clamp(0.0, 1.0) };
    finish(grads, vec![alpha1, 1.0 - alpha1])
}

/// Frank–Wolfe with away steps on q(α) = αᵀQα, Q = G·Gᵀ. Exact line search
/// on the quadratic; away steps drop vertices exactly, giving linear
/// convergence to the required 1e−10 duality gap.
fn frank_wolfe(grads: &GradientMatrix) -> Result<AlphaResult, SimplexError> {
    let m = grads.m();
    // Gram matrix Q, m×m
    let mut q = vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let dot: f64 = grads.row(i).iter().zip(grads.row(j)).map(|(a, b)| a * b).sum();
            q[i * m + j] = dot;
            q[j * m + i] = dot;
        }
    }
    let qdot = |a: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| q[i * m..(i + 1) * m].iter().zip(a).map(|(x, y)| x * y).sum())
            .collect()
    };

    let mut alpha = vec![1.0 / m as f64; m];
    let mut gap = f64::INFINITY;
    for _iter in 0..FW_MAX_ITERS {
        let qa = qdot(&alpha); // ∇q/2
        let grad: Vec<f64> = qa.iter().map(|x| 2.0 * x).collect();
        let ga: f64 = grad.iter().zip(&alpha).map(|(g, a)| g * a).sum();

        let s = (0..m)
            .min_by(|&i, &j| grad[i].partial_cmp(&grad[j]).expect("finite"))
            .expect("m ≥ 3");
        gap = ga - grad[s];
        if gap <= FW_TOL {
            return Ok(finish(grads, normalize(alpha)));
        }

        let a_idx = (0..m)
            .filter(|&i| alpha[i] > 0.0)
            .max_by(|&i, &j| grad[i].partial_cmp(&grad[j]).expect("finite"))
            .expect("simplex point has support");
        let away_gap = grad[a_idx] - ga;

        // direction d and maximal step
        let (d, gamma_max): (Vec<f64>, f64) = if gap >= away_gap {
            let mut d: Vec<f64> = alpha.iter().map(|a| -a).collect();
            d[s] += 1.0;
            (d, 1.0)
        } else {
            let mut d: Vec<f64> = alpha.clone();
            d[a_idx] -= 1.0;
            let aa = alpha[a_idx];
            (d, if aa < 1.0 { aa / (1.0 - aa) } else { 1.0 })
        };

        let slope: f64 = grad.iter().zip(&d).map(|(g, di)| g * di).sum();
        let qd = qdot(&d);
        let curv: f64 = d.iter().zip(&qd).map(|(x, y)| x * y).sum();
        let gamma = if curv > 0.0 {
            (-slope / (2.0 * curv)).clamp(0.0, gamma_max)
        } else {
            gamma_max
        };
        for (ai, di) in alpha.iter_mut().zip(&d) {
            *ai += gamma * di;
        }
        // clean tiny negatives from rounding, keep exactly on the simplex
        alpha = normalize(alpha);
    }
    Err(SimplexError::NoConvergence {
        gap,
        iters: FW_MAX_ITERS,
        tol: FW_TOL,
        best: finish(grads, normalize(alpha)),
    })
}

fn normalize(mut alpha: Vec<f64>) -> Vec<f64> {
    for a in alpha.iter_mut() {
        if *a < 1e-15 {
            *a = 0.0;
        }
    }
    let sum: f64 = alpha.iter().sum();
    if sum > 0.0 {
        for a in alpha.iter_mut() {
            *a /= sum;
        }
    } else {
        let m = alpha.len();
        alpha = vec![1.0 / m as f64; m];
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gm(rows: &[&[f64]]) -> GradientMatrix {
        GradientMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn opposite_gradients_are_stationary() {
        let r = min_norm_alpha(&gm(&[&[1.0, 0.0], &[-1.0, 0.0]])).unwrap();
        assert_relative_eq!(r.alpha[0], 0.5, epsilon = 1e-12);
        assert!(r.min_norm_value <= 1e-12);
    }

    #[test]
    fn orthogonal_unit_gradients() {
        let r = min_norm_alpha(&gm(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_relative_eq!(r.alpha[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.min_norm_value, std::f64::consts::SQRT_2 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_gradients_tie_break_uniform() {
        let r = min_norm_alpha(&gm(&[&[3.0, 4.0], &[3.0, 4.0]])).unwrap();
        assert_eq!(r.alpha, vec![0.5, 0.5]);
        assert_relative_eq!(r.min_norm_value, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn dominated_direction_clips_to_shorter_gradient() {
        let r = min_norm_alpha(&gm(&[&[1.0, 0.0], &[2.0, 0.0]])).unwrap();
        assert_eq!(r.alpha, vec![1.0, 0.0]);
        assert_relative_eq!(r.min_norm_value, 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            stationarity_residual(&gm(&[&[1.0, 0.0], &[2.0, 0.0]])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn all_zero_gradients_are_stationary_with_uniform_alpha() {
        let r = min_norm_alpha(&gm(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(r.alpha, vec![0.5, 0.5]);
        assert_eq!(r.min_norm_value, 0.0);
    }

    #[test]
    fn single_objective_rejected() {
        assert!(matches!(
            min_norm_alpha(&gm(&[&[1.0, 0.0]])),
            Err(SimplexError::TooFewObjectives(1))
        ));
    }

    #[test]
    fn two_task_matches_dense_grid_oracle() {
        // brute force over α₁ with step 1e−6, the independent oracle
        let cases: Vec<(Vec<f64>, Vec<f64>)> = vec![
            (vec![1.0, 0.0], vec![0.0, 1.0]),
            (vec![2.0, 1.0], vec![-1.0, 0.5]),
            (vec![0.3, -0.8], vec![0.1, 0.9]),
            (vec![5.0, 0.0], vec![4.0, 3.0]),
        ];
        for (g1, g2) in cases {
            let g = gm(&[&g1, &g2]);
            let r = min_norm_alpha(&g).unwrap();
            let mut best = f64::INFINITY;
            let mut best_a = 0.0;
            let steps = 1_000_000u32;
            for i in 0..=steps {
                let a = i as f64 / steps as f64;
                let vx = a * g1[0] + (1.0 - a) * g2[0];
                let vy = a * g1[1] + (1.0 - a) * g2[1];
                let v = (vx * vx + vy * vy).sqrt();
                if v < best {
                    best = v;
                    best_a = a;
                }
            }
            assert!(
                (r.min_norm_value - best).abs() <= 1e-9 + 1e-6 * best,
                "value {} vs grid {best}",
                r.min_norm_value
            );
            assert!((r.alpha[0] - best_a).abs() <= 1e-5, "alpha {} vs grid {best_a}", r.alpha[0]);
        }
    }

    #[test]
    fn correction_examples() {
        let r = corrected_alpha(&gm(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_relative_eq!(r.c[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.c[1], 0.5, epsilon = 1e-12);

        let r0 = corrected_alpha(&gm(&[&[1.0, -2.0], &[-1.0, 2.0]])).unwrap();
        assert!(r0.c.norm() <= 1e-12, "exact stationarity needs no correction");
    }

    #[test]
    fn corrected_gradients_admit_exact_zero_combination() {
        let g = gm(&[&[1.0, 2.0, 0.0], &[0.5, -1.0, 1.0], &[-0.2, 0.3, 0.4]]);
        let r = corrected_alpha(&g).unwrap();
        let n = g.n();
        let mut resid = vec![0.0; n];
        for i in 0..g.m() {
            for j in 0..n {
                resid[j] += r.alpha.alpha[i] * (g.row(i)[j] - r.c[j]);
            }
        }
        let norm: f64 = resid.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm <= 1e-10, "Σαᵢ(gᵢ − c) = {norm}");
    }

    #[test]
    fn frank_wolfe_interior_optimum_three_tasks() {
        // symmetric: three unit gradients at 120°, optimum is the centroid = 0
        let g = gm(&[
            &[1.0, 0.0],
            &[-0.5, 0.866_025_403_784_438_6],
            &[-0.5, -0.866_025_403_784_438_6],
        ]);
        let r = min_norm_alpha(&g).unwrap();
        assert!(r.min_norm_value <= 1e-6, "residual {}", r.min_norm_value);
        for a in &r.alpha {
            assert_relative_eq!(*a, 1.0 / 3.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn frank_wolfe_boundary_optimum() {
        // third gradient is dominated: optimum lives on the face α₃ = 0
        let g = gm(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 2.0]]);
        let r = min_norm_alpha(&g).unwrap();
        assert_relative_eq!(r.min_norm_value, std::f64::consts::SQRT_2 / 2.0, epsilon = 1e-8);
        assert!(r.alpha[2] <= 1e-10, "dominated gradient keeps zero weight");
    }

    #[test]
    fn alpha_invariants_hold() {
        let g = gm(&[&[1.5, -0.3, 2.0], &[0.1, 0.9, -1.0], &[-0.7, 0.2, 0.5]]);
        let r = min_norm_alpha(&g).unwrap();
        let sum: f64 = r.alpha.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        assert!(r.alpha.iter().all(|&a| a >= 0.0));
        assert_relative_eq!(r.min_norm_value, r.combined.norm(), epsilon = 1e-12);
    }

    #[test]
    fn kkt_support_has_equal_inner_products() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=6);
            let rows: Vec<Vec<f64>> =
                (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let g = GradientMatrix::from_rows(rows).unwrap();
            let r = min_norm_alpha(&g).unwrap();
            if r.min_norm_value <= 1e-9 {
                continue; // inner products on the support are all ~0, nothing to compare
            }
            let d = r.combined.as_slice();
            let dots: Vec<f64> = (0..g.m())
                .map(|i| g.row(i).iter().zip(d).map(|(a, b)| a * b).sum())
                .collect();
            let min_dot = dots.iter().copied().fold(f64::INFINITY, f64::min);
            for i in 0..g.m() {
                if r.alpha[i] > 1e-9 {
                    assert!(
                        (dots[i] - min_dot).abs() <= 1e-6 * (1.0 + min_dot.abs()),
                        "support inner product {} vs min {min_dot}",
                        dots[i]
                    );
                }
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let g = gm(&[&[1.0, 2.0], &[-0.5, 0.7]]);
        let r1 = min_norm_alpha(&g).unwrap();
        let scaled = gm(&[&[3.0, 6.0], &[-1.5, 2.1]]);
        let r2 = min_norm_alpha(&scaled).unwrap();
        assert_relative_eq!(r1.alpha[0], r2.alpha[0], epsilon = 1e-10);
        assert_relative_eq!(3.0 * r1.min_norm_value, r2.min_norm_value, max_relative = 1e-10);
    }
}
