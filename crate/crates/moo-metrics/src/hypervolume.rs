//! Hypervolume of a point set against a reference corner (minimization).
//!
//! Every point `p` with `p < reference` componentwise spans the axis-aligned
//! box `[p, reference]`; the hypervolume is the measure of the union of those
//! boxes. Points at or beyond the reference in any coordinate span an empty
//! clipped box and simply contribute nothing — expansion trajectories can
//! exit the reference box transiently, so they are clipped, not rejected.

use moo_core::ObjectiveValues;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::MetricsError;

/// How to measure the union of boxes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HvMode {
    /// Exact sort-and-sweep over two objectives.
    Exact2d,
    /// Exact sweep over the sorted third coordinate with an incrementally
    /// maintained two-dimensional measure.
    Exact3d,
    /// Seeded uniform sampling inside the bounding box of the union;
    /// works for any number of objectives.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Reference corner plus measurement mode.
#[derive(Clone, Debug, PartialEq)]
pub struct HvConfig {
    pub reference: ObjectiveValues,
    pub mode: HvMode,
}

/// Monte-Carlo estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HvEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Measures the hypervolume of `points` against `cfg.reference`.
///
/// Exact modes cover two and three objectives; anything higher must use
/// [`HvMode::MonteCarlo`]. The result is zero unless at least one point
/// strictly dominates the reference in every coordinate. Non-finite points
/// contribute nothing.
pub fn hypervolume(points: &[ObjectiveValues], cfg: &HvConfig) -> Result<f64, MetricsError> {
    let m = check_dims(points, &cfg.reference)?;
    match cfg.mode {
        HvMode::Exact2d | HvMode::Exact3d => {
            if m > 3 {
                return Err(MetricsError::Unsupported(format!(
                    "exact hypervolume covers at most three objectives, got {m}; \
                     use the Monte-Carlo mode"
                )));
            }
            let kept = clip(points, &cfg.reference);
            match (cfg.mode, m) {
                (HvMode::Exact2d, 2) => {
                    Ok(exact_2d(
                        kept.iter().map(|p| [p[0], p[1]]).collect(),
                        [cfg.reference[0], cfg.reference[1]],
                    ))
                }
                (HvMode::Exact3d, 3) => {
                    Ok(exact_3d(
                        kept.iter().map(|p| [p[0], p[1], p[2]]).collect(),
                        [cfg.reference[0], cfg.reference[1], cfg.reference[2]],
                    ))
                }
                (HvMode::Exact2d, _) => Err(MetricsError::DimensionMismatch(format!(
                    "the planar sweep needs exactly two objectives, got {m}"
                ))),
                (HvMode::Exact3d, _) => Err(MetricsError::DimensionMismatch(format!(
                    "the volumetric sweep needs exactly three objectives, got {m}"
                ))),
                (HvMode::MonteCarlo { .. }, _) => unreachable!("handled below"),
            }
        }
        HvMode::MonteCarlo { samples, seed } => {
            Ok(hv_monte_carlo(points, &cfg.reference, samples, seed)?.value)
        }
    }
}

/// Estimates the hypervolume by uniform sampling and reports the estimate
/// together with its binomial standard error.
///
/// Samples are drawn from the smallest axis-aligned box that contains the
/// whole union; a sample counts as a hit when some point dominates it.
pub fn hv_monte_carlo(
    points: &[ObjectiveValues],
    reference: &ObjectiveValues,
    samples: usize,
    seed: u64,
) -> Result<HvEstimate, MetricsError> {
    let m = check_dims(points, reference)?;
    if samples == 0 {
        return Err(MetricsError::InvalidConfig(
            "Monte-Carlo estimation needs at least one sample".into(),
        ));
    }
    let kept = clip(points, reference);
    if kept.is_empty() {
        return Ok(HvEstimate { value: 0.0, std_error: 0.0 });
    }
    let lower: Vec<f64> = (0..m)
        .map(|i| kept.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume: f64 = (0..m).map(|i| reference[i] - lower[i]).product();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; m];
    let mut hits = 0u64;
    for _ in 0..samples {
        for (i, coord) in point.iter_mut().enumerate() {
            *coord = lower[i] + (reference[i] - lower[i]) * rng.gen::<f64>();
        }
        if kept
            .iter()
            .any(|p| p.iter().zip(&point).all(|(pi, ui)| pi <= ui))
        {
            hits += 1;
        }
    }
    let fraction = hits as f64 / samples as f64;
    Ok(HvEstimate {
        value: fraction * volume,
        std_error: volume * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
    })
}

/// Default reference corner for a bundled benchmark, or `None` when the
/// benchmark has no canonical corner.
///
/// `tasks` sizes the corner for benchmarks whose task count is configurable;
/// fixed two-task benchmarks ignore it.
pub fn default_reference(benchmark: &str, tasks: usize) -> Option<ObjectiveValues> {
    match benchmark {
        // front lives in f1 ∈ [0, 1], f2 = 1 − f1²; the scaling term is ≤ 10
        "zdt2" => Some(ObjectiveValues::new(vec![1.1, 11.0])),
        // per-task binary cross-entropy at chance level is ln 2
        "toy-mlp" => Some(ObjectiveValues::new(vec![
            std::f64::consts::LN_2 * 1.1;
            tasks
        ])),
        _ => None,
    }
}

fn check_dims(points: &[ObjectiveValues], reference: &ObjectiveValues) -> Result<usize, MetricsError> {
    let m = reference.len();
    if m == 0 {
        return Err(MetricsError::DimensionMismatch(
            "reference corner is empty".into(),
        ));
    }
    if !reference.is_finite() {
        return Err(MetricsError::InvalidConfig(
            "reference corner must be finite".into(),
        ));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != m {
            return Err(MetricsError::DimensionMismatch(format!(
                "point {i} has {} objectives, reference has {m}",
                p.len()
            )));
        }
    }
    Ok(m)
}

/// Keeps only finite points strictly inside the reference corner; everything
/// else spans a zero-measure clipped box.
fn clip<'a>(points: &'a [ObjectiveValues], reference: &ObjectiveValues) -> Vec<&'a [f64]> {
    points
        .iter()
        .filter(|p| {
            p.is_finite()
                && p.as_slice()
                    .iter()
                    .zip(reference.as_slice())
                    .all(|(pi, ri)| pi < ri)
        })
        .map(|p| p.as_slice())
        .collect()
}

/// Sort-and-sweep union area for two objectives (inputs already clipped).
fn exact_2d(mut pts: Vec<[f64; 2]>, reference: [f64; 2]) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("clipped points are finite"));
    // the non-dominated staircase has strictly decreasing second coordinates
    let mut steps: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        if steps.last().map_or(true, |last| p[1] < last[1]) {
            steps.push(p);
        }
    }
    let mut area = 0.0;
    for (i, p) in steps.iter().enumerate() {
        let next_f1 = steps.get(i + 1).map_or(reference[0], |q| q[0]);
        area += (next_f1 - p[0]) * (reference[1] - p[1]);
    }
    area
}

/// Sweep over the sorted third coordinate; the planar measure of everything
/// at or below the sweep plane is maintained incrementally.
fn exact_3d(mut pts: Vec<[f64; 3]>, reference: [f64; 3]) -> f64 {
    pts.sort_by(|a, b| a[2].partial_cmp(&b[2]).expect("clipped points are finite"));
    let mut stairs = Staircase::new([reference[0], reference[1]]);
    let mut volume = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let z = pts[i][2];
        while i < pts.len() && pts[i][2] == z {
            stairs.insert([pts[i][0], pts[i][1]]);
            i += 1;
        }
        let z_next = pts.get(i).map_or(reference[2], |p| p[2]);
        volume += stairs.area * (z_next - z);
    }
    volume
}

/// Union area of planar boxes, updated point by point.
///
/// Stairs are kept sorted by first coordinate with decreasing second
/// coordinate; inserting a point adds exactly the area of its box not yet
/// covered and retires stairs the new point dominates.
struct Staircase {
    reference: [f64; 2],
    stairs: Vec<[f64; 2]>,
    area: f64,
}

impl Staircase {
    fn new(reference: [f64; 2]) -> Self {
        Staircase { reference, stairs: Vec::new(), area: 0.0 }
    }

    fn insert(&mut self, p: [f64; 2]) {
        let idx = self.stairs.partition_point(|s| s[0] <= p[0]);
        if idx > 0 && self.stairs[idx - 1][1] <= p[1] {
            return; // an existing box already covers this one
        }
        // sweep right from the insertion point, accumulating the strip of
        // each gap between the new box's top edge and the current coverage
        let mut ceiling = if idx > 0 { self.stairs[idx - 1][1] } else { self.reference[1] };
        let mut cur_x = p[0];
        let mut gain = 0.0;
        for s in &self.stairs[idx..] {
            if ceiling <= p[1] {
                break;
            }
            gain += (s[0] - cur_x) * (ceiling - p[1]);
            ceiling = s[1];
            cur_x = s[0];
        }
        if ceiling > p[1] {
            gain += (self.reference[0] - cur_x) * (ceiling - p[1]);
        }
        self.area += gain;

        let end = idx + self.stairs[idx..].partition_point(|s| s[1] >= p[1]);
        self.stairs.splice(idx..end, [p]);
    }
}
