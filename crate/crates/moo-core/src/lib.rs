//! Shared vocabulary for the Pareto-exploration workspace.
//!
//! Everything downstream builds on four things defined here: dense decision /
//! objective vectors, Pareto dominance tests, the [`ProblemOracle`] trait that
//! exposes a vector objective through `f` / `∇f` / Hessian-vector products, and
//! [`CostCounters`] that meter every oracle call so evaluation budgets can be
//! compared across methods.

mod counters;
mod dominance;
mod error;
mod problem;
mod record;
mod types;

pub use counters::{CostCounters, CostSnapshot};
pub use dominance::{dominates, nondominated_filter};
pub use error::CoreError;
pub use problem::{ProblemHandle, ProblemOracle};
pub use record::{AlphaResult, ParetoRecord, Stage};
pub use types::{GradientMatrix, ObjectiveValues, ParamVector};
