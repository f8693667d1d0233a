use std::fmt::Write as _;

use moo_core::{AlphaResult, ObjectiveValues, ParamVector, ProblemHandle};
use nalgebra::{DMatrix, SymmetricEigen};

use crate::{ExpansionError, TangentDirection};

/// Largest n for which the combined Hessian is assembled densely.
pub const DENSE_EIGEN_CAP: usize = 2000;

/// Finite-difference step for the five-point image-curve stencils.
const PROBE_STEP: f64 = 1e-3;

/// Near-null eigenvectors of the combined Hessian at x.
#[derive(Clone, Debug)]
pub struct NullBasis {
    pub vectors: Vec<ParamVector>,
    pub eigen_tolerance: f64,
}

/// Second-order agreement between two image curves at t = 0.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureReport {
    pub value_gap: f64,
    pub tangent_angle_gap: f64,
    pub curvature_gap: f64,
}

/// Assemble H = Σ αᵢ∇²fᵢ(x) column-by-column (n Hessian applies), then keep
/// the eigenvectors whose |eigenvalue| is at most `eigen_tolerance` times
/// the spectral radius. Desk-scale only: refuses n > [`DENSE_EIGEN_CAP`].
pub fn null_space_basis(
    problem: &ProblemHandle,
    x: &ParamVector,
    alpha: &AlphaResult,
    eigen_tolerance: f64,
) -> Result<NullBasis, ExpansionError> {
    let n = problem.n();
    if n > DENSE_EIGEN_CAP {
        return Err(ExpansionError::DenseCapExceeded {
            n,
            cap: DENSE_EIGEN_CAP,
        });
    }
    if !(eigen_tolerance > 0.0) {
        return Err(ExpansionError::InvalidArgument(format!(
            "eigen tolerance must be positive, got {eigen_tolerance}"
        )));
    }

    let mut h = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = ParamVector::zeros(n);
        e.0[j] = 1.0;
        let col = problem.hvp(x, &alpha.alpha, &e)?;
        for i in 0..n {
            h[(i, j)] = col[i];
        }
    }
    // symmetrize to wash out round-off asymmetry before the eigensolve
    let h = (&h + h.transpose()) * 0.5;

    let eig = SymmetricEigen::new(h);
    let spectral_radius = eig.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l.abs()));
    let mut vectors = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= eigen_tolerance * spectral_radius {
            vectors.push(ParamVector::new(eig.eigenvectors.column(idx).iter().copied().collect()));
        }
    }
    Ok(NullBasis {
        vectors,
        eigen_tolerance,
    })
}

/// Sample the image curve c_d(t) = f(x + t·d) on a grid.
pub fn image_curve_probe(
    problem: &ProblemHandle,
    x: &ParamVector,
    d: &ParamVector,
    t_grid: &[f64],
) -> Result<Vec<ObjectiveValues>, ExpansionError> {
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        out.push(problem.evaluate(&x.add_scaled(t, d))?);
    }
    Ok(out)
}

/// Render a probe as CSV (`t,f_1,…,f_m`) for plotting.
pub fn probe_csv(t_grid: &[f64], values: &[ObjectiveValues]) -> String {
    let m = values.first().map(|v| v.len()).unwrap_or(0);
    let mut s = String::from("t");
    for j in 1..=m {
        let _ = write!(s, ",f_{j}");
    }
    s.push('\n');
    for (t, f) in t_grid.iter().zip(values) {
        let _ = write!(s, "{t}");
        for v in f.as_slice() {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Signed curvature of a plane curve from first and second derivatives:
/// κ = (f₁′f₂″ − f₂′f₁″) / (f₁′² + f₂′²)^{3/2}.
pub fn curvature_kappa(f1p: f64, f2p: f64, f1pp: f64, f2pp: f64) -> Result<f64, ExpansionError> {
    let speed_sq = f1p * f1p + f2p * f2p;
    if speed_sq == 0.0 {
        return Err(ExpansionError::DegenerateTangent);
    }
    Ok((f1p * f2pp - f2p * f1pp) / speed_sq.powf(1.5))
}

/// First and second derivatives at t = 0 from five equally spaced samples
/// f(−2h), f(−h), f(0), f(h), f(2h).
fn stencil_derivatives(samples: &[f64; 5], h: f64) -> (f64, f64) {
    let fp = (samples[0] - 8.0 * samples[1] + 8.0 * samples[3] - samples[4]) / (12.0 * h);
    let fpp = (-samples[0] + 16.0 * samples[1] - 30.0 * samples[2] + 16.0 * samples[3]
        - samples[4])
        / (12.0 * h * h);
    (fp, fpp)
}

/// Compare the image curves of v and v + u through second order at t = 0.
///
/// If u is a null vector of the combined Hessian, theory says the two curves
/// share value, tangent direction, and curvature; the report quantifies how
/// far a given u is from that ideal. Costs ten objective evaluations.
pub fn augmentation_check(
    problem: &ProblemHandle,
    x: &ParamVector,
    v: &TangentDirection,
    u: &ParamVector,
) -> Result<CurvatureReport, ExpansionError> {
    if problem.m() != 2 {
        return Err(ExpansionError::TwoObjectivesOnly { m: problem.m() });
    }
    if u.len() != problem.n() {
        return Err(ExpansionError::InvalidArgument(format!(
            "augmentation vector has {} entries for n = {}",
            u.len(),
            problem.n()
        )));
    }
    let h = PROBE_STEP;
    let grid = [-2.0 * h, -h, 0.0, h, 2.0 * h];
    let augmented = v.v.add_scaled(1.0, u);

    let mut curves = Vec::with_capacity(2);
    for d in [&v.v, &augmented] {
        let probe = image_curve_probe(problem, x, d, &grid)?;
        let f1: [f64; 5] = std::array::from_fn(|i| probe[i][0]);
        let f2: [f64; 5] = std::array::from_fn(|i| probe[i][1]);
        let (f1p, f1pp) = stencil_derivatives(&f1, h);
        let (f2p, f2pp) = stencil_derivatives(&f2, h);
        curves.push((probe[2].clone(), f1p, f2p, f1pp, f2pp));
    }
    let (at0_a, a1p, a2p, a1pp, a2pp) = curves[0].clone();
    let (at0_b, b1p, b2p, b1pp, b2pp) = curves[1].clone();

    let value_gap = at0_a
        .as_slice()
        .iter()
        .zip(at0_b.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let na = (a1p * a1p + a2p * a2p).sqrt();
    let nb = (b1p * b1p + b2p * b2p).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(ExpansionError::DegenerateTangent);
    }
    let dot = a1p * b1p + a2p * b2p;
    let cross = a1p * b2p - a2p * b1p;
    let tangent_angle_gap = cross.abs().atan2(dot);

    let kappa_a = curvature_kappa(a1p, a2p, a1pp, a2pp)?;
    let kappa_b = curvature_kappa(b1p, b2p, b1pp, b2pp)?;
    Ok(CurvatureReport {
        value_gap,
        tangent_angle_gap,
        curvature_gap: (kappa_a - kappa_b).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{expand_direction, BetaSample, BetaStrategy};
    use moo_benchmarks::{RankDeficientQuadratic, TwoQuadratics};
    use moo_core::{CoreError, GradientMatrix, ProblemOracle};
    use moo_simplex::min_norm_alpha;
    use std::sync::Arc;

    fn stationary_alpha(problem: &ProblemHandle, x: &ParamVector) -> AlphaResult {
        min_norm_alpha(&problem.gradients(x).unwrap()).unwrap()
    }

    #[test]
    fn curvature_examples() {
        assert!((curvature_kappa(0.0, 1.0, -1.0, 0.0).unwrap() - 1.0).abs() <= 1e-15);
        assert!((curvature_kappa(1.0, 0.0, 0.0, -2.0).unwrap() + 2.0).abs() <= 1e-15);
        assert_eq!(curvature_kappa(1.0, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(
            curvature_kappa(0.0, 0.0, 1.0, 1.0),
            Err(ExpansionError::DegenerateTangent)
        ));
    }

    #[test]
    fn probe_hits_the_grid_exactly() {
        let problem = ProblemHandle::new(Arc::new(RankDeficientQuadratic));
        let x = ParamVector::new(vec![0.5, 1.0, -1.0]);
        let d = ParamVector::new(vec![1.0, 0.0, 0.0]);
        let grid = [-0.2, 0.0, 0.2];
        let curve = image_curve_probe(&problem, &x, &d, &grid).unwrap();
        let f0 = problem.evaluate(&x).unwrap();
        assert_eq!(curve[1].as_slice(), f0.as_slice(), "t = 0 reproduces f(x)");
        // quadratic objectives trace exact parabolas in t
        for (i, &t) in grid.iter().enumerate() {
            let expect_f1 = (x[0] + t - 1.0) * (x[0] + t - 1.0);
            let expect_f2 = (x[0] + t + 1.0) * (x[0] + t + 1.0);
            assert!((curve[i][0] - expect_f1).abs() <= 1e-14);
            assert!((curve[i][1] - expect_f2).abs() <= 1e-14);
        }
    }

    #[test]
    fn probe_csv_is_plottable() {
        let grid = [-0.1, 0.1];
        let vals = vec![
            ObjectiveValues::new(vec![1.0, 2.0]),
            ObjectiveValues::new(vec![3.0, 4.0]),
        ];
        let csv = probe_csv(&grid, &vals);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,f_1,f_2");
        assert_eq!(lines[1], "-0.1,1,2");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn rank_deficient_null_basis_spans_the_flat_plane() {
        let problem = ProblemHandle::new(Arc::new(RankDeficientQuadratic));
        let x = ParamVector::new(vec![0.0, 0.3, -0.8]);
        let alpha = stationary_alpha(&problem, &x);
        let basis = null_space_basis(&problem, &x, &alpha, 1e-10).unwrap();
        assert_eq!(basis.vectors.len(), 2);
        for u in &basis.vectors {
            assert!(u[0].abs() <= 1e-8, "null vectors have no x₁ component: {u:?}");
            assert!((u.norm() - 1.0).abs() <= 1e-12);
            let hu = problem.hvp(&x, &alpha.alpha, u).unwrap();
            assert!(hu.norm() <= 1e-10 * 2.0, "‖Hu‖ = {}", hu.norm());
        }
        // the two vectors span {e₂, e₃}: check via projections
        let gram00 = basis.vectors[0].dot(&basis.vectors[0]);
        let gram01 = basis.vectors[0].dot(&basis.vectors[1]);
        assert!((gram00 - 1.0).abs() <= 1e-12 && gram01.abs() <= 1e-10, "orthonormal");
    }

    #[test]
    fn full_rank_problem_has_empty_null_basis() {
        let p = TwoQuadratics::new(
            ParamVector::new(vec![0.0, 0.0]),
            ParamVector::new(vec![1.0, 0.0]),
        )
        .unwrap();
        let problem = ProblemHandle::new(Arc::new(p));
        let x = ParamVector::new(vec![0.5, 0.0]);
        let alpha = stationary_alpha(&problem, &x);
        let basis = null_space_basis(&problem, &x, &alpha, 1e-8).unwrap();
        assert!(basis.vectors.is_empty(), "H = 2I has no null directions");
    }

    #[test]
    fn oversized_problems_are_refused() {
        struct Huge;
        impl ProblemOracle for Huge {
            fn n(&self) -> usize {
                DENSE_EIGEN_CAP + 1
            }
            fn m(&self) -> usize {
                2
            }
            fn eval(&self, _: &[f64]) -> Result<Vec<f64>, CoreError> {
                unreachable!("capability check fires first")
            }
            fn gradients(&self, _: &[f64]) -> Result<GradientMatrix, CoreError> {
                unreachable!()
            }
            fn hvp(&self, _: &[f64], _: &[f64], _: &[f64]) -> Result<Vec<f64>, CoreError> {
                unreachable!()
            }
        }
        let problem = ProblemHandle::new(Arc::new(Huge));
        let x = ParamVector::zeros(DENSE_EIGEN_CAP + 1);
        let alpha = AlphaResult {
            alpha: vec![0.5, 0.5],
            min_norm_value: 0.0,
            combined: ParamVector::zeros(DENSE_EIGEN_CAP + 1),
        };
        assert!(matches!(
            null_space_basis(&problem, &x, &alpha, 1e-8),
            Err(ExpansionError::DenseCapExceeded { .. })
        ));
    }

    /// Anisotropic two-quadratic fixture whose image-curve curvature really
    /// depends on the probe direction: f₁ = (x₁−1)² + x₂²/2, f₂ = (x₁+1)² + 2x₂².
    /// Pareto set: the segment x₂ = x₃ = 0, x₁ ∈ [−1, 1]; combined Hessian
    /// diag(2, α₁ + 4α₂, 0) has exactly one null direction, e₃.
    struct AnisotropicSegment;

    impl ProblemOracle for AnisotropicSegment {
        fn n(&self) -> usize {
            3
        }
        fn m(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
            Ok(vec![
                (x[0] - 1.0) * (x[0] - 1.0) + 0.5 * x[1] * x[1],
                (x[0] + 1.0) * (x[0] + 1.0) + 2.0 * x[1] * x[1],
            ])
        }
        fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError> {
            GradientMatrix::from_rows(vec![
                vec![2.0 * (x[0] - 1.0), x[1], 0.0],
                vec![2.0 * (x[0] + 1.0), 4.0 * x[1], 0.0],
            ])
        }
        fn hvp(&self, _x: &[f64], a: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
            Ok(vec![2.0 * (a[0] + a[1]) * v[0], (a[0] + 4.0 * a[1]) * v[1], 0.0])
        }
    }

    fn tangent_at(problem: &ProblemHandle, x: &ParamVector) -> (TangentDirection, AlphaResult) {
        let alpha = stationary_alpha(problem, x);
        let beta = BetaSample {
            beta: vec![1.0, -0.3],
            strategy: BetaStrategy::StandardNormal,
        };
        let dir = expand_direction(problem, x, &alpha, &beta, 5, true).unwrap();
        (dir, alpha)
    }

    #[test]
    fn zero_augmentation_gives_zero_gaps() {
        let problem = ProblemHandle::new(Arc::new(AnisotropicSegment));
        let x = ParamVector::zeros(3);
        let (dir, _) = tangent_at(&problem, &x);
        let report = augmentation_check(&problem, &x, &dir, &ParamVector::zeros(3)).unwrap();
        assert_eq!(report.value_gap, 0.0);
        assert_eq!(report.tangent_angle_gap, 0.0);
        assert_eq!(report.curvature_gap, 0.0);
    }

    #[test]
    fn null_augmentation_preserves_value_tangent_and_curvature() {
        for oracle in [
            Arc::new(RankDeficientQuadratic) as Arc<dyn ProblemOracle>,
            Arc::new(AnisotropicSegment),
        ] {
            let problem = ProblemHandle::new(oracle);
            let x = ParamVector::zeros(3);
            let (dir, alpha) = tangent_at(&problem, &x);
            let basis = null_space_basis(&problem, &x, &alpha, 1e-10).unwrap();
            assert!(!basis.vectors.is_empty());
            for u in &basis.vectors {
                let report = augmentation_check(&problem, &x, &dir, u).unwrap();
                assert!(report.value_gap <= 1e-6, "value gap {}", report.value_gap);
                assert!(
                    report.tangent_angle_gap <= 1e-6,
                    "tangent gap {}",
                    report.tangent_angle_gap
                );
                assert!(
                    report.curvature_gap <= 1e-6,
                    "curvature gap {}",
                    report.curvature_gap
                );
            }
        }
    }

    #[test]
    fn non_null_augmentation_changes_the_curvature_when_it_truly_differs() {
        let problem = ProblemHandle::new(Arc::new(AnisotropicSegment));
        let x = ParamVector::zeros(3);
        let (dir, _) = tangent_at(&problem, &x);
        // e₂ is decisively outside the null space (eigenvalue α₁ + 4α₂)
        let u = ParamVector::new(vec![0.0, 1.0, 0.0]);
        let report = augmentation_check(&problem, &x, &dir, &u).unwrap();
        assert!(report.value_gap <= 1e-12, "same base point either way");
        assert!(
            report.tangent_angle_gap <= 1e-6,
            "first-order agreement holds for any u here: {}",
            report.tangent_angle_gap
        );
        assert!(
            report.curvature_gap > 1e-3,
            "second-order disagreement must be detected: {}",
            report.curvature_gap
        );
    }

    #[test]
    fn wrong_objective_count_is_rejected() {
        struct ThreeObjectives;
        impl ProblemOracle for ThreeObjectives {
            fn n(&self) -> usize {
                2
            }
            fn m(&self) -> usize {
                3
            }
            fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
                Ok(vec![x[0], x[1], x[0] + x[1]])
            }
            fn gradients(&self, _: &[f64]) -> Result<GradientMatrix, CoreError> {
                GradientMatrix::from_rows(vec![
                    vec![1.0, 0.0],
                    vec![0.0, 1.0],
                    vec![1.0, 1.0],
                ])
            }
            fn hvp(&self, _: &[f64], _: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
                Ok(vec![0.0; v.len()])
            }
        }
        let problem = ProblemHandle::new(Arc::new(ThreeObjectives));
        let dir = TangentDirection {
            v: ParamVector::new(vec![1.0, 0.0]),
            residual: 0.0,
            beta_used: BetaSample {
                beta: vec![1.0, 0.0, 0.0],
                strategy: BetaStrategy::OneHot(0),
            },
            corrected: false,
            orientation: crate::Orientation::Raw,
        };
        assert!(matches!(
            augmentation_check(&problem, &ParamVector::zeros(2), &dir, &ParamVector::zeros(2)),
            Err(ExpansionError::TwoObjectivesOnly { m: 3 })
        ));
    }
}
