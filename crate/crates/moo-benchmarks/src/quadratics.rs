use moo_core::{CoreError, GradientMatrix, ParamVector, ProblemOracle};

use crate::BenchmarkError;

/// f₁ = ‖x − a‖², f₂ = ‖x − b‖². The Pareto set is the closed segment
/// [a, b], so the tangent direction at any interior Pareto point is known
/// exactly: it is parallel to b − a.
pub struct TwoQuadratics {
    a: ParamVector,
    b: ParamVector,
}

impl TwoQuadratics {
    pub fn new(a: ParamVector, b: ParamVector) -> Result<Self, BenchmarkError> {
        if a.len() == 0 || a.len() != b.len() {
            return Err(BenchmarkError::Config(format!(
                "centers must share a positive dimension, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(TwoQuadratics { a, b })
    }

    pub fn centers(&self) -> (&ParamVector, &ParamVector) {
        (&self.a, &self.b)
    }

    /// Ground-truth (unnormalized) tangent of the Pareto set: b − a.
    pub fn segment_direction(&self) -> ParamVector {
        ParamVector::new(
            self.b
                .as_slice()
                .iter()
                .zip(self.a.as_slice())
                .map(|(b, a)| b - a)
                .collect(),
        )
    }
}

impl ProblemOracle for TwoQuadratics {
    fn n(&self) -> usize {
        self.a.len()
    }

    fn m(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        let sq = |c: &ParamVector| {
            x.iter()
                .zip(c.as_slice())
                .map(|(xi, ci)| (xi - ci) * (xi - ci))
                .sum::<f64>()
        };
        Ok(vec![sq(&self.a), sq(&self.b)])
    }

    fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError> {
        let row = |c: &ParamVector| {
            x.iter()
                .zip(c.as_slice())
                .map(|(xi, ci)| 2.0 * (xi - ci))
                .collect::<Vec<f64>>()
        };
        GradientMatrix::from_rows(vec![row(&self.a), row(&self.b)])
    }

    fn hvp(&self, _x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
        // each component Hessian is 2I, so H = 2(α₁ + α₂)I
        let s = 2.0 * (alpha[0] + alpha[1]);
        Ok(v.iter().map(|vi| s * vi).collect())
    }
}

/// f₁ = (x₁ − 1)², f₂ = (x₁ + 1)² over three parameters. Both objectives
/// ignore x₂ and x₃, so the combined Hessian is 2·e₁e₁ᵀ with a
/// two-dimensional null space spanned by e₂ and e₃ at every point.
pub struct RankDeficientQuadratic;

impl ProblemOracle for RankDeficientQuadratic {
    fn n(&self) -> usize {
        3
    }

    fn m(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        Ok(vec![(x[0] - 1.0) * (x[0] - 1.0), (x[0] + 1.0) * (x[0] + 1.0)])
    }

    fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError> {
        GradientMatrix::from_rows(vec![
            vec![2.0 * (x[0] - 1.0), 0.0, 0.0],
            vec![2.0 * (x[0] + 1.0), 0.0, 0.0],
        ])
    }

    fn hvp(&self, _x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
        Ok(vec![2.0 * (alpha[0] + alpha[1]) * v[0], 0.0, 0.0])
    }
}
