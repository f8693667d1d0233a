//! Central finite-difference oracles used to validate analytic derivatives.

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], eps: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + eps;
        let fp = f(&xp);
        xp[i] = x[i] - eps;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * eps);
    }
    g
}

/// Central difference of a gradient field along direction v:
/// (∇f(x + εv) − ∇f(x − εv)) / 2ε ≈ H(x)·v.
pub fn fd_hvp(grad: &mut dyn FnMut(&[f64]) -> Vec<f64>, x: &[f64], v: &[f64], eps: f64) -> Vec<f64> {
    let xp: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi + eps * vi).collect();
    let xm: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi - eps * vi).collect();
    let gp = grad(&xp);
    let gm = grad(&xm);
    gp.iter().zip(&gm).map(|(p, m)| (p - m) / (2.0 * eps)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_gradient_on_a_quadratic() {
        let mut f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
        let g = fd_gradient(&mut f, &[2.0, 1.0], 1e-6);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn fd_hvp_on_a_quadratic() {
        // f = x₁² + x₁x₂, H = [[2, 1], [1, 0]]
        let mut grad = |x: &[f64]| vec![2.0 * x[0] + x[1], x[0]];
        let hv = fd_hvp(&mut grad, &[0.3, -0.7], &[1.0, 2.0], 1e-5);
        assert!((hv[0] - 4.0).abs() < 1e-8);
        assert!((hv[1] - 1.0).abs() < 1e-8);
    }
}
