use std::ops::{Add, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// Shared oracle-call tallies. Increments are atomic so one set of counters
/// can sit behind problem handles cloned across threads; readers take
/// [`CostSnapshot`]s and difference them to attribute cost to a pipeline stage.
#[derive(Debug, Default)]
pub struct CostCounters {
    n_f: AtomicU64,
    n_grad: AtomicU64,
    n_hvp: AtomicU64,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_f(&self, k: u64) {
        self.n_f.fetch_add(k, Ordering::Relaxed);
    }

    pub fn add_grad(&self, k: u64) {
        self.n_grad.fetch_add(k, Ordering::Relaxed);
    }

    pub fn add_hvp(&self, k: u64) {
        self.n_hvp.fetch_add(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CostSnapshot {
        CostSnapshot {
            n_f: self.n_f.load(Ordering::Relaxed),
            n_grad: self.n_grad.load(Ordering::Relaxed),
            n_hvp: self.n_hvp.load(Ordering::Relaxed),
        }
    }
}

/// Point-in-time view of [`CostCounters`]: objective evaluations, full
/// gradient-set evaluations, and Hessian-vector products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostSnapshot {
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hvp: u64,
}

impl CostSnapshot {
    pub fn new(n_f: u64, n_grad: u64, n_hvp: u64) -> Self {
        CostSnapshot { n_f, n_grad, n_hvp }
    }

    pub fn is_zero(&self) -> bool {
        *self == CostSnapshot::default()
    }
}

impl Add for CostSnapshot {
    type Output = CostSnapshot;
    fn add(self, rhs: CostSnapshot) -> CostSnapshot {
        CostSnapshot {
            n_f: self.n_f + rhs.n_f,
            n_grad: self.n_grad + rhs.n_grad,
            n_hvp: self.n_hvp + rhs.n_hvp,
        }
    }
}

/// Difference of two snapshots of the same counters; panics if `rhs` is not
/// an earlier snapshot (counters are monotone).
impl Sub for CostSnapshot {
    type Output = CostSnapshot;
    fn sub(self, rhs: CostSnapshot) -> CostSnapshot {
        CostSnapshot {
            n_f: self.n_f - rhs.n_f,
            n_grad: self.n_grad - rhs.n_grad,
            n_hvp: self.n_hvp - rhs.n_hvp,
        }
    }
}
