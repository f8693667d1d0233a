use serde::{Deserialize, Serialize};

use crate::{GradientMatrix, ObjectiveValues, ParamVector};

/// Solution of the min-norm problem over the simplex: weights α, the norm of
/// the combined gradient (the stationarity residual), and the combined
/// gradient Σ αᵢ∇fᵢ itself.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaResult {
    pub alpha: Vec<f64>,
    pub min_norm_value: f64,
    pub combined: ParamVector,
}

/// Which pipeline stage produced a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Seed,
    Optimized,
    Expanded,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Seed => "seed",
            Stage::Optimized => "optimized",
            Stage::Expanded => "expanded",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seed" => Ok(Stage::Seed),
            "optimized" => Ok(Stage::Optimized),
            "expanded" => Ok(Stage::Expanded),
            other => Err(format!("unknown stage '{other}'")),
        }
    }
}

/// One explored solution: where it sits, its objective values, the gradient
/// set and simplex weights at convergence, and how it was produced. Gradients
/// are optional so huge problems can skip storage and recompute on demand
/// (see [`ParetoRecord::GRADIENT_STORAGE_CAP`]).
#[derive(Clone, Debug)]
pub struct ParetoRecord {
    pub id: u64,
    pub x: ParamVector,
    pub f: ObjectiveValues,
    pub grads: Option<GradientMatrix>,
    pub alpha: Option<AlphaResult>,
    pub parent_id: Option<u64>,
    pub stage: Stage,
}

impl ParetoRecord {
    /// Above this many stored gradient entries (m×n) records drop the matrix.
    pub const GRADIENT_STORAGE_CAP: usize = 1_000_000;

    /// Stationarity residual ‖Σ αᵢ∇fᵢ‖ if the min-norm solve was recorded.
    pub fn residual(&self) -> Option<f64> {
        self.alpha.as_ref().map(|a| a.min_norm_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_round_trips_through_strings() {
        for stage in [Stage::Seed, Stage::Optimized, Stage::Expanded] {
            let s = stage.to_string();
            assert_eq!(s.parse::<Stage>().unwrap(), stage);
        }
        assert!("bogus".parse::<Stage>().is_err());
    }

    #[test]
    fn residual_comes_from_alpha() {
        let rec = ParetoRecord {
            id: 0,
            x: ParamVector::zeros(2),
            f: ObjectiveValues::new(vec![1.0, 2.0]),
            grads: None,
            alpha: Some(AlphaResult {
                alpha: vec![0.5, 0.5],
                min_norm_value: 0.25,
                combined: ParamVector::zeros(2),
            }),
            parent_id: None,
            stage: Stage::Seed,
        };
        assert_eq!(rec.residual(), Some(0.25));
    }
}
