use crate::CoreError;

/// Decision vector x ∈ R^n (network weights or benchmark variables).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        ParamVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        ParamVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &ParamVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// self + s·d, used for line-search trials and tangent steps.
    pub fn add_scaled(&self, s: f64, d: &ParamVector) -> ParamVector {
        debug_assert_eq!(self.len(), d.len());
        ParamVector(
            self.0
                .iter()
                .zip(&d.0)
                .map(|(x, dx)| x + s * dx)
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> ParamVector {
        ParamVector(self.0.iter().map(|x| s * x).collect())
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(values: Vec<f64>) -> Self {
        ParamVector(values)
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Objective vector f(x) ∈ R^m (per-task losses, all minimized).
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveValues(pub Vec<f64>);

impl ObjectiveValues {
    pub fn new(values: Vec<f64>) -> Self {
        ObjectiveValues(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for ObjectiveValues {
    fn from(values: Vec<f64>) -> Self {
        ObjectiveValues(values)
    }
}

impl std::ops::Index<usize> for ObjectiveValues {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Row-major m×n matrix whose row i is ∇f_i(x).
#[derive(Clone, Debug, PartialEq)]
pub struct GradientMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl GradientMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, CoreError> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(m * n);
        for row in &rows {
            if row.len() != n {
                return Err(CoreError::dim("gradient matrix row", n, row.len()));
            }
            data.extend_from_slice(row);
        }
        Ok(GradientMatrix { m, n, data })
    }

    pub fn from_flat(m: usize, n: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if data.len() != m * n {
            return Err(CoreError::dim("gradient matrix data", m * n, data.len()));
        }
        Ok(GradientMatrix { m, n, data })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Gᵀα: the convex/affine combination Σ αᵢ ∇f_i, length n.
    pub fn combine(&self, alpha: &[f64]) -> Result<ParamVector, CoreError> {
        if alpha.len() != self.m {
            return Err(CoreError::dim("combine weights", self.m, alpha.len()));
        }
        let mut out = vec![0.0; self.n];
        for (i, &a) in alpha.iter().enumerate() {
            for (o, g) in out.iter_mut().zip(self.row(i)) {
                *o += a * g;
            }
        }
        Ok(ParamVector(out))
    }

    /// G·v: per-objective directional derivatives ∇f_i · v, length m.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, CoreError> {
        if v.len() != self.n {
            return Err(CoreError::dim("direction", self.n, v.len()));
        }
        Ok((0..self.m)
            .map(|i| self.row(i).iter().zip(v).map(|(g, d)| g * d).sum())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_scaled_moves_along_direction() {
        let x = ParamVector::new(vec![1.0, 2.0]);
        let d = ParamVector::new(vec![0.5, -1.0]);
        let y = x.add_scaled(2.0, &d);
        assert_eq!(y.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn gradient_matrix_combine_and_apply() {
        let g = GradientMatrix::from_rows(vec![vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 1.0]]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.n(), 3);
        let c = g.combine(&[0.5, 0.5]).unwrap();
        assert_eq!(c.as_slice(), &[0.5, 1.5, 1.5]);
        let d = g.apply(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(d, vec![3.0, 4.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = GradientMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]);
        assert!(err.is_err(), "ragged rows must be a dimension error");
    }
}
