//! Quality and cost metrics for multi-objective runs.
//!
//! Two measurements matter when comparing front-finding strategies: how much
//! objective space a point set covers, and how many oracle calls it took to
//! get there. This crate provides both:
//!
//! - [`hypervolume`] measures the union of axis-aligned boxes spanned between
//!   each point and a reference corner (minimization convention). Exact
//!   sort-and-sweep algorithms cover two and three objectives; a seeded
//!   Monte-Carlo estimator ([`hv_monte_carlo`]) serves as a validation oracle
//!   and as the only option beyond three objectives.
//! - [`cost_report`] merges per-stage evaluation counters into a small table
//!   (rows = pipeline stages, columns = objective / gradient / Hessian-vector
//!   counts) that renders as aligned text or JSON.
//!
//! [`default_reference`] supplies per-benchmark reference corners so runs on
//! the bundled problems are comparable without hand-picking a corner.

mod hypervolume;
mod report;

pub use hypervolume::{
    default_reference, hv_monte_carlo, hypervolume, HvConfig, HvEstimate, HvMode,
};
pub use report::{cost_report, CostReport, CostRow};

/// Errors raised by metric computations.
#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    /// Point or reference dimensions disagree, or don't fit the chosen mode.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The request is outside what the implementation can compute exactly.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A configuration value is out of range.
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
}
