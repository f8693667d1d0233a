//! Differentiation engine for a small shared-trunk multi-task MLP.
//!
//! The graph is fixed: dense trunk layers with tanh, one linear head per
//! task, softmax-cross-entropy per task averaged over a full batch. Smooth
//! activations keep every loss twice continuously differentiable, which the
//! second-order tangent machinery downstream requires.
//!
//! Three sweeps are provided:
//! - forward: both task losses from one shared-trunk pass,
//! - reverse: exact gradients per task (replayed over the cached forward),
//! - forward-over-reverse: Hessian-vector products H(x)v for the weighted
//!   loss Σ αᵢ fᵢ in a single augmented sweep, never forming H.
//!
//! Forward state lives on the call stack (no shared caches), so a [`Tape`]
//! can be shared freely across threads; sweep counters are atomic.

mod fd;
mod tape;

pub use fd::{fd_gradient, fd_hvp};
pub use tape::{MlpSpec, ParamSegment, SweepCounts, Tape, TwoTaskDataset};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("numeric overflow: non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid task index {task}, tape has {tasks} tasks")]
    BadTask { task: usize, tasks: usize },
}
