//! Expansion step: predict directions that slide along the Pareto set.
//!
//! At a Pareto stationary point x* with simplex weights α, first-order
//! optimality is preserved along directions v that solve the sampled system
//!
//! ```text
//! H(x*) v = (∇f(x*)ᵀ − c·1ᵀ) β,   H = Σ αᵢ ∇²fᵢ,   c = ∇f(x*)ᵀα
//! ```
//!
//! for some weight sample β. The system is solved matrix-free with a few
//! MINRES iterations ([`expand_direction`]); the resulting unit direction is
//! sign-disambiguated against a target objective ([`orient_direction`]) and
//! its first-order objective change is predictable without extra oracle
//! calls ([`predict_delta_f`]).
//!
//! The second half of the crate checks the theory behind augmentation:
//! null vectors u of H added to a tangent v leave the image curve
//! f(x* + t(v+u)) unchanged through second order at t = 0. [`null_space_basis`]
//! extracts u candidates by dense eigendecomposition (desk scale only), and
//! [`augmentation_check`] measures value/tangent/curvature gaps between the
//! two image curves with five-point finite-difference stencils.

mod beta;
mod curvature;
mod tangent;

pub use beta::{BetaSample, BetaStrategy};
pub use curvature::{
    augmentation_check, curvature_kappa, image_curve_probe, null_space_basis, probe_csv,
    CurvatureReport, NullBasis, DENSE_EIGEN_CAP,
};
pub use tangent::{
    expand_direction, expand_direction_resampled, orient_direction, predict_delta_f, Orientation,
    TangentDirection, RESAMPLE_LIMIT,
};

use moo_core::CoreError;
use moo_minres::MinresError;

#[derive(Debug, thiserror::Error)]
pub enum ExpansionError {
    /// The sampled right-hand side vanished (β in the kernel of the
    /// gradient spread); the caller should draw a fresh β.
    #[error("degenerate direction sample: ‖rhs‖ = {rhs_norm:.3e} vs gradient scale {grad_scale:.3e}")]
    DegenerateSample { rhs_norm: f64, grad_scale: f64 },
    #[error("image-curve tangent is zero; curvature is undefined")]
    DegenerateTangent,
    #[error("dense null-space extraction capped at n ≤ {cap}, problem has n = {n}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("curvature reports are defined for exactly two objectives, got m = {m}")]
    TwoObjectivesOnly { m: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Minres(#[from] MinresError),
}
