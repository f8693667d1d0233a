use std::sync::Arc;

use crate::{CoreError, CostCounters, CostSnapshot, GradientMatrix, ObjectiveValues, ParamVector};

/// A smooth vector objective exposed through the three oracle calls the
/// toolkit needs: f(x), the full gradient set, and combined Hessian-vector
/// products H(x)v with H = Σ αᵢ∇²fᵢ(x). Implementations must be deterministic
/// for fixed inputs (all desk problems are full-batch).
pub trait ProblemOracle: Send + Sync {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError>;
    fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError>;
    fn hvp(&self, x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError>;
}

/// Metered, shareable wrapper around a [`ProblemOracle`]. Every call
/// increments exactly one counter: `n_f` per objective evaluation, `n_grad`
/// per full gradient set, and `n_hvp` by m per combined Hessian-vector
/// product (one apply of each component Hessian).
#[derive(Clone)]
pub struct ProblemHandle {
    oracle: Arc<dyn ProblemOracle>,
    counters: Arc<CostCounters>,
}

impl ProblemHandle {
    pub fn new(oracle: Arc<dyn ProblemOracle>) -> Self {
        ProblemHandle {
            oracle,
            counters: Arc::new(CostCounters::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.oracle.n()
    }

    pub fn m(&self) -> usize {
        self.oracle.m()
    }

    pub fn counters(&self) -> &CostCounters {
        &self.counters
    }

    pub fn snapshot(&self) -> CostSnapshot {
        self.counters.snapshot()
    }

    fn check_x(&self, x: &ParamVector) -> Result<(), CoreError> {
        if x.len() != self.n() {
            return Err(CoreError::dim("parameter vector", self.n(), x.len()));
        }
        if !x.is_finite() {
            return Err(CoreError::NonFinite {
                context: "parameter vector",
            });
        }
        Ok(())
    }

    fn check_alpha(&self, alpha: &[f64]) -> Result<(), CoreError> {
        if alpha.len() != self.m() {
            return Err(CoreError::dim("simplex weights", self.m(), alpha.len()));
        }
        let sum: f64 = alpha.iter().sum();
        if alpha.iter().any(|&a| !a.is_finite() || a < -1e-9) || (sum - 1.0).abs() > 1e-6 {
            return Err(CoreError::InvalidAlpha {
                reason: format!("weights {alpha:?} are not on the unit simplex"),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &ParamVector) -> Result<ObjectiveValues, CoreError> {
        self.check_x(x)?;
        let f = self.oracle.eval(x.as_slice())?;
        self.counters.add_f(1);
        if f.len() != self.m() {
            return Err(CoreError::dim("objective vector", self.m(), f.len()));
        }
        let f = ObjectiveValues::new(f);
        if !f.is_finite() {
            return Err(CoreError::NonFinite {
                context: "objective values",
            });
        }
        Ok(f)
    }

    pub fn gradients(&self, x: &ParamVector) -> Result<GradientMatrix, CoreError> {
        self.check_x(x)?;
        let g = self.oracle.gradients(x.as_slice())?;
        self.counters.add_grad(1);
        if g.m() != self.m() || g.n() != self.n() {
            return Err(CoreError::dim("gradient matrix", self.m() * self.n(), g.m() * g.n()));
        }
        if !g.is_finite() {
            return Err(CoreError::NonFinite {
                context: "gradient matrix",
            });
        }
        Ok(g)
    }

    pub fn hvp(&self, x: &ParamVector, alpha: &[f64], v: &ParamVector) -> Result<ParamVector, CoreError> {
        self.check_x(x)?;
        self.check_alpha(alpha)?;
        if v.len() != self.n() {
            return Err(CoreError::dim("hvp direction", self.n(), v.len()));
        }
        let hv = self.oracle.hvp(x.as_slice(), alpha, v.as_slice())?;
        self.counters.add_hvp(self.m() as u64);
        if hv.len() != self.n() {
            return Err(CoreError::dim("hvp output", self.n(), hv.len()));
        }
        let hv = ParamVector::new(hv);
        if !hv.is_finite() {
            return Err(CoreError::NonFinite {
                context: "hessian-vector product",
            });
        }
        Ok(hv)
    }
}
