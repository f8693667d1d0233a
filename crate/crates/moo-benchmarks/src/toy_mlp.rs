use std::sync::Arc;

use moo_autodiff::{MlpSpec, Tape, TwoTaskDataset};
use moo_core::{CoreError, GradientMatrix, ParamVector, ProblemHandle, ProblemOracle};
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::BenchmarkError;

pub const TOY_MLP_POINTS: usize = 200;
pub const TOY_MLP_FLIPS: usize = 20;

/// Two Gaussian blobs in the plane (centers ±(1,1), σ = 0.85), one label
/// channel per task. Task 1 labels points by their blob; task 2 copies task
/// 1 and then flips `flips` labels, half from each class, so the tasks
/// genuinely conflict while both stay class-balanced.
pub fn two_blob_dataset(
    seed: u64,
    n_points: usize,
    flips: usize,
) -> Result<TwoTaskDataset, BenchmarkError> {
    if n_points % 2 != 0 || flips % 2 != 0 || flips > n_points {
        return Err(BenchmarkError::Config(format!(
            "need even point and flip counts with flips ≤ points, got {n_points} and {flips}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.85).expect("positive std dev");
    let half = n_points / 2;
    let mut inputs = Vec::with_capacity(n_points * 2);
    let mut task1 = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let class = (i >= half) as u8;
        let center = if class == 0 { -1.0 } else { 1.0 };
        inputs.push(center + rng.sample::<f64, _>(noise));
        inputs.push(center + rng.sample::<f64, _>(noise));
        task1.push(class);
    }
    let mut task2 = task1.clone();
    for class_start in [0, half] {
        for idx in sample(&mut rng, half, flips / 2) {
            let i = class_start + idx;
            task2[i] = 1 - task2[i];
        }
    }
    Ok(TwoTaskDataset::new(inputs, vec![task1, task2], n_points, 2)?)
}

/// Shared-trunk tanh MLP with one softmax cross-entropy head per task over
/// a fixed [`two_blob_dataset`]. Smooth everywhere, so gradients and
/// Hessian-vector products are exact tape sweeps.
pub struct ToyMlpTwoTask {
    tape: Tape,
}

impl ToyMlpTwoTask {
    pub fn new(widths: &[usize], dataset: TwoTaskDataset) -> Result<Self, BenchmarkError> {
        let spec = MlpSpec::new(widths.to_vec(), 2)?;
        Ok(ToyMlpTwoTask {
            tape: Tape::new(spec, dataset)?,
        })
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }
}

impl ProblemOracle for ToyMlpTwoTask {
    fn n(&self) -> usize {
        self.tape.n_params()
    }

    fn m(&self) -> usize {
        self.tape.n_tasks()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
        self.tape.forward(x).map_err(|e| CoreError::Oracle(e.to_string()))
    }

    fn gradients(&self, x: &[f64]) -> Result<GradientMatrix, CoreError> {
        let rows = self
            .tape
            .gradient_all(x)
            .map_err(|e| CoreError::Oracle(e.to_string()))?;
        GradientMatrix::from_rows(rows)
    }

    fn hvp(&self, x: &[f64], alpha: &[f64], v: &[f64]) -> Result<Vec<f64>, CoreError> {
        self.tape
            .hvp(x, alpha, v)
            .map_err(|e| CoreError::Oracle(e.to_string()))
    }
}

/// Build the desk-scale MLP problem. The seed fixes the dataset, and the
/// returned start point is the seed-determined weight initialization.
pub fn toy_mlp_build(
    seed: u64,
    widths: &[usize],
) -> Result<(ProblemHandle, ParamVector), BenchmarkError> {
    let dataset = two_blob_dataset(seed, TOY_MLP_POINTS, TOY_MLP_FLIPS)?;
    let problem = ToyMlpTwoTask::new(widths, dataset)?;
    let n = problem.n();
    // weight init drawn after the dataset from the same stream, offset so the
    // two draws cannot alias
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9E37_79B9_7F4A_7C15));
    let init = Normal::new(0.0, 0.5).expect("positive std dev");
    let x0 = ParamVector::new((0..n).map(|_| rng.sample::<f64, _>(init)).collect());
    Ok((ProblemHandle::new(Arc::new(problem)), x0))
}
