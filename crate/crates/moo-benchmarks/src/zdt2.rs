use std::f64::consts::PI;

use moo_core::{CoreError, GradientMatrix, ParamVector, ProblemOracle};
use rand::Rng;

/// Fully analytic two-objective problem in three parameters:
///
/// ```text
/// u  = x₁ + x₂² + x₃²        ρ = x₂² + x₃²
/// y₁ = (sin u + 1)/2         y₂ = y₃ = (cos ρ + 1)/2
/// g  = 1 + 9(y₂ + y₃)/2
/// f₁ = y₁                    f₂ = g − y₁²/g
/// ```
///
/// Pareto front: f₂ = 1 − f₁² with f₁ ∈ [0, 1]. Pareto set: the concentric
/// cylinders x₂² + x₃² = (2k+1)π. The ray sin u = −1 (where ∇f₁ = 0) is
/// Pareto stationary but dominated whenever x₂² + x₃² misses a cylinder.
pub struct Zdt2Variant;

/// Intermediate values shared by value, gradient, and Hessian evaluation.
struct Parts {
    w: [f64; 3],
    z: [f64; 3],
    sin_u: f64,
    cos_u: f64,
    sin_rho: f64,
    cos_rho: f64,
    y1: f64,
    g: f64,
}

fn parts(x: &[f64]) -> Parts {
    let rho = x[1] * x[1] + x[2] * x[2];
    let u = x[0] + rho;
    let (sin_u, cos_u) = u.sin_cos();
    let (sin_rho, cos_rho) = rho.sin_cos();
    let y1 = (sin_u + 1.0) / 2.0;
    let y2 = (cos_rho + 1.0) / 2.0;
    let y3 = y2;
    let g = 1.0 + 9.0 * (y2 + y3) / 2.0;
    Parts {
        w: [1.0, 2.0 * x[1], 2.0 * x[2]],
        z: [0.0, 2.0 * x[1], 2.0 * x[2]],
        sin_u,
        cos_u,
        sin_rho,
        cos_rho,
        y1,
        g,
    }
}

/// Objective values (f₁, f₂); total on any length-3 input.
pub fn zdt2_eval(x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), 3, "zdt2 takes exactly three parameters");
    let p = parts(x);
    vec![p.y1, p.g - p.y1 * p.y1 / p.g]
}

/// Distance of an objective pair from the analytic front f₂ = 1 − f₁²,
/// or +∞ when f₁ falls outside the front's [0, 1] range.
pub fn zdt2_front_residual(f: &[f64]) -> f64 {
    assert_eq!(f.len(), 2, "front residual takes an objective pair");
    if !(0.0..=1.0).contains(&f[0]) {
        return f64::INFINITY;
    }
    (f[1] - (1.0 - f[0] * f[0])).abs()
}

/// Distance of x from the nearest Pareto-set cylinder:
/// min over k ≥ 0 of |x₂² + x₃² − (2k+1)π|.
pub fn zdt2_set_residual(x: &[f64]) -> f64 {
    assert_eq!(x.len(), 3, "set residual takes exactly three parameters");
    let r2 = x[1] * x[1] + x[2] * x[2];
    let k = (((r2 / PI) - 1.0) / 2.0).round().max(0.0);
    let near = (r2 - (2.0 * k + 1.0) * PI).abs();
    if k >= 1.0 {
        near.min((r2 - (2.0 * (k - 1.0) + 1.0) * PI).abs())
    } else {
        near
    }
}

impl Zdt2Variant {
    /// Point on the innermost Pareto set that maps to (f₁, 1 − f₁²); θ picks
    /// the position around the cylinder.
    pub fn front_point(f1: f64, theta: f64) -> ParamVector {
        assert!((0.0..=1.0).contains(&f1), "front parametrized by f₁ ∈ [0,1]");
        let u = (2.0 * f1 - 1.0).asin();
        let r = PI.sqrt();
        ParamVector::new(vec![u - PI, r * theta.cos(), r * theta.sin()])
    }

    /// Random start near the innermost cylinder, in the basin where descent
    /// reaches the front rather than the degenerate ∇f₁ = 0 ray.
    pub fn sample_seed<R: Rng + ?Sized>(rng: &mut R) -> ParamVector {
        let x1 = rng.gen_range(-3.1..-2.1);
        let r = rng.gen_range(1.55..2.0);
        let theta = rng.gen_range(0.0..2.0 * PI);
        ParamVector::new(vec![x1, r * theta.cos(), r * theta.sin()])
    }

    fn hessians(x: &[f64]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
        let p = parts(x);
        let d = [[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]];

        let mut h_y1 = [[0.0; 3]; 3];
        let mut h_y2 = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                h_y1[i][j] = -(p.sin_u / 2.0) * p.w[i] * p.w[j] + (p.cos_u / 2.0) * d[i][j];
                h_y2[i][j] = -(p.cos_rho / 2.0) * p.z[i] * p.z[j] - (p.sin_rho / 2.0) * d[i][j];
            }
        }

        let grad_y1: Vec<f64> = p.w.iter().map(|wi| (p.cos_u / 2.0) * wi).collect();
        let grad_g: Vec<f64> = p.z.iter().map(|zi| 9.0 * (-p.sin_rho / 2.0) * zi).collect();
        let (y1, g) = (p.y1, p.g);
        let a = 1.0 + (y1 / g) * (y1 / g);
        let b = -2.0 * y1 / g;
        // ∇A and ∇B by the chain rule through y₁ and g
        let grad_a: Vec<f64> = (0..3)
            .map(|i| 2.0 * (y1 / (g * g)) * grad_y1[i] - 2.0 * (y1 * y1 / (g * g * g)) * grad_g[i])
            .collect();
        let grad_b: Vec<f64> = (0..3)
            .map(|i| -(2.0 / g) * grad_y1[i] + (2.0 * y1 / (g * g)) * grad_g[i])
            .collect();

        let mut h_f2 = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                h_f2[i][j] = grad_g[i] * grad_a[j]
                    + a * 9.0 * h_y2[i][j]
                    + grad_y1[i] * grad_b[j]
                    + b * h_y1[i][j];
            }
        }
        (h_y1, h_f2)
    }
}

impl ProblemOracle for Zdt2Variant {
    fn n(&self) -> usize {
        3
    }

    fn m(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        Ok(zdt2_eval(x))
    }

    fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError> {
        let p = parts(x);
        let grad_y1: Vec<f64> = p.w.iter().map(|wi| (p.cos_u / 2.0) * wi).collect();
        let grad_g: Vec<f64> = p.z.iter().map(|zi| 9.0 * (-p.sin_rho / 2.0) * zi).collect();
        let a = 1.0 + (p.y1 / p.g) * (p.y1 / p.g);
        let b = -2.0 * p.y1 / p.g;
        let grad_f2: Vec<f64> = (0..3).map(|i| a * grad_g[i] + b * grad_y1[i]).collect();
        GradientMatrix::from_rows(vec![grad_y1, grad_f2])
    }

    fn hvp(&self, x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
        let (h1, h2) = Zdt2Variant::hessians(x);
        let mut out = vec![0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += (alpha[0] * h1[i][j] + alpha[1] * h2[i][j]) * v[j];
            }
        }
        Ok(out)
    }
}
