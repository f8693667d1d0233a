use rand::Rng;
use rand_distr::StandardNormal;

use crate::ExpansionError;

/// How the objective-weight sample β is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaStrategy {
    /// m iid standard-normal entries.
    StandardNormal,
    /// Uniform point on the unit simplex (a random convex combination of
    /// the one-hot vertices).
    ConvexSpan,
    /// The i-th one-hot vector: expand toward a single objective.
    OneHot(usize),
    /// Independent fair coin per entry, rejecting all-zero and all-one
    /// draws so the sample always mixes objectives.
    CoinFlipSubset,
}

/// A concrete β draw together with the strategy that produced it.
#[derive(Clone, Debug)]
pub struct BetaSample {
    pub beta: Vec<f64>,
    pub strategy: BetaStrategy,
}

impl BetaSample {
    pub fn draw<R: Rng + ?Sized>(
        strategy: BetaStrategy,
        m: usize,
        rng: &mut R,
    ) -> Result<BetaSample, ExpansionError> {
        if m < 2 {
            return Err(ExpansionError::InvalidArgument(format!(
                "β needs at least two objectives, got m = {m}"
            )));
        }
        let beta = match strategy {
            BetaStrategy::StandardNormal => loop {
                let b: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                if b.iter().any(|&v| v != 0.0) {
                    break b;
                }
            },
            BetaStrategy::ConvexSpan => {
                // −ln U exponentials normalized: uniform on the simplex
                let raw: Vec<f64> = (0..m).map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0_f64).ln()).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            }
            BetaStrategy::OneHot(i) => {
                if i >= m {
                    return Err(ExpansionError::InvalidArgument(format!(
                        "one-hot index {i} out of range for m = {m}"
                    )));
                }
                let mut b = vec![0.0; m];
                b[i] = 1.0;
                b
            }
            BetaStrategy::CoinFlipSubset => loop {
                let b: Vec<f64> = (0..m).map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 }).collect();
                let ones = b.iter().filter(|&&v| v == 1.0).count();
                if ones > 0 && ones < m {
                    break b;
                }
            },
        };
        Ok(BetaSample { beta, strategy })
    }
}
