//! Test problems with known Pareto structure, exposed as metered oracles.
//!
//! Four problems cover the feature matrix of the toolkit:
//!
//! * [`Zdt2Variant`] — three parameters, two objectives, fully analytic:
//!   the Pareto front is f₂ = 1 − f₁² and the Pareto set is a family of
//!   concentric cylinders, so front and set membership can be checked in
//!   closed form. It also owns a degenerate Pareto-stationary ray (∇f₁ = 0,
//!   f₁ = 0, f₂ ≥ 1) that stress-tests optimizers.
//! * [`TwoQuadratics`] — two spheres with distinct centers; the Pareto set
//!   is exactly the segment between the centers, giving a ground-truth
//!   tangent direction for the expansion machinery.
//! * [`RankDeficientQuadratic`] — both objectives depend on x₁ only, so the
//!   combined Hessian has a two-dimensional null space everywhere.
//! * [`ToyMlpTwoTask`] — a shared-trunk tanh MLP with two softmax
//!   cross-entropy heads over a fixed synthetic two-blob dataset whose second
//!   label channel disagrees on a balanced subset, forcing a genuine
//!   objective trade-off.
//!
//! [`build_benchmark`] maps stable string ids to ready-to-run instances.

mod quadratics;
mod toy_mlp;
mod zdt2;

pub use quadratics::{RankDeficientQuadratic, TwoQuadratics};
pub use toy_mlp::{toy_mlp_build, two_blob_dataset, ToyMlpTwoTask, TOY_MLP_FLIPS, TOY_MLP_POINTS};
pub use zdt2::{zdt2_eval, zdt2_front_residual, zdt2_set_residual, Zdt2Variant};

use std::sync::Arc;

use moo_core::{ParamVector, ProblemHandle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, thiserror::Error)]
pub enum BenchmarkError {
    #[error("unknown benchmark id `{0}` (known: {})", benchmark_ids().join(", "))]
    UnknownBenchmark(String),
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Autodiff(#[from] moo_autodiff::AutodiffError),
}

/// A problem ready to run: metered handle plus the seed-determined start point.
pub struct BenchmarkInstance {
    pub id: String,
    pub handle: ProblemHandle,
    pub x0: ParamVector,
}

pub fn benchmark_ids() -> Vec<&'static str> {
    vec!["zdt2", "two-quadratics", "rank-deficient", "toy-mlp"]
}

/// Instantiate a benchmark by id. The seed pins every random choice (start
/// point, and for the MLP also dataset and weight init), so equal ids and
/// seeds give bitwise-identical problems.
pub fn build_benchmark(id: &str, seed: u64) -> Result<BenchmarkInstance, BenchmarkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (handle, x0) = match id {
        "zdt2" => (
            ProblemHandle::new(Arc::new(Zdt2Variant)),
            Zdt2Variant::sample_seed(&mut rng),
        ),
        "two-quadratics" => {
            let problem = TwoQuadratics::new(
                ParamVector::new(vec![0.0, 0.0]),
                ParamVector::new(vec![1.0, 0.0]),
            )
            .expect("default centers are valid");
            let x0 = ParamVector::new((0..2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
            (ProblemHandle::new(Arc::new(problem)), x0)
        }
        "rank-deficient" => {
            let x0 = ParamVector::new((0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect());
            (ProblemHandle::new(Arc::new(RankDeficientQuadratic)), x0)
        }
        "toy-mlp" => toy_mlp_build(seed, &[2, 8, 2])?,
        other => return Err(BenchmarkError::UnknownBenchmark(other.to_string())),
    };
    Ok(BenchmarkInstance {
        id: id.to_string(),
        handle,
        x0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_knows_all_ids() {
        for id in benchmark_ids() {
            let inst = build_benchmark(id, 7).expect(id);
            assert_eq!(inst.id, id);
            assert_eq!(inst.x0.len(), inst.handle.n(), "{id}: start point dimension");
            inst.handle.evaluate(&inst.x0).expect(id);
        }
    }

    #[test]
    fn unknown_id_is_an_error() {
        match build_benchmark("zdt999", 0) {
            Err(BenchmarkError::UnknownBenchmark(id)) => assert_eq!(id, "zdt999"),
            Err(other) => panic!("wrong error: {other}"),
            Ok(_) => panic!("unknown id must not build"),
        }
    }

    #[test]
    fn same_seed_same_instance() {
        for id in benchmark_ids() {
            let a = build_benchmark(id, 42).unwrap();
            let b = build_benchmark(id, 42).unwrap();
            assert_eq!(a.x0.as_slice(), b.x0.as_slice(), "{id}: start point");
            let fa = a.handle.evaluate(&a.x0).unwrap();
            let fb = b.handle.evaluate(&b.x0).unwrap();
            assert_eq!(fa.0, fb.0, "{id}: objective values must match bitwise");
        }
    }
}
