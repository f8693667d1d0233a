//! Continuous parametrizations over explored records, and stitching of
//! independently grown fronts into one non-dominated union.
//!
//! A *chain* covers a two-objective front with a scalar t ∈ [−1, 1]: nodes
//! are ordered by their first objective and placed at knots proportional to
//! objective-space arc length, so t traverses the front at roughly uniform
//! speed. A *patch* spans the convex hull of a center and its children under
//! simplex weights r. Sampling either interpolates stored parameter vectors
//! linearly; knots and vertices reproduce their stored x exactly.

use std::collections::HashMap;

use moo_core::{dominates, ObjectiveValues, ParamVector, ParetoRecord, ProblemHandle};

use crate::ExplorerError;

/// Slack accepted on domain boundaries before a query is rejected.
const DOMAIN_EPS: f64 = 1e-12;

/// The per-record data a parametrization keeps: identity, location in
/// parameter space, and objective values.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontNode {
    pub id: u64,
    pub x: ParamVector,
    pub f: ObjectiveValues,
}

impl FrontNode {
    pub fn from_record(record: &ParetoRecord) -> FrontNode {
        FrontNode {
            id: record.id,
            x: record.x.clone(),
            f: record.f.clone(),
        }
    }
}

/// A continuous piece of front: either a scalar-parametrized chain or a
/// simplex-weighted patch around one center.
#[derive(Clone, Debug)]
pub enum FrontParametrization {
    /// Nodes sorted by f₁ with strictly increasing knots spanning [−1, 1]
    /// (a single node collapses the domain to {0}).
    Chain { nodes: Vec<FrontNode>, knots: Vec<f64> },
    /// A center and the children expanded from it; queries average the
    /// center toward the children under weights r ≥ 0 with Σr ≤ 1.
    Patch {
        center: FrontNode,
        children: Vec<FrontNode>,
    },
}

/// Order parent-linked two-objective records into a chain.
///
/// The records must contain exactly one seed (no parent), every parent link
/// must resolve inside the set without cycles, and after sorting by f₁ each
/// adjacent pair must be directly parent-linked — anything else is a
/// structure error. Knots are assigned by cumulative objective-space arc
/// length, normalized to [−1, 1]; identical-objective neighbors fall back to
/// uniform index spacing so knots stay strictly increasing.
pub fn build_chain(records: &[ParetoRecord]) -> Result<FrontParametrization, ExplorerError> {
    if records.is_empty() {
        return Err(ExplorerError::BrokenChain("no records supplied".into()));
    }
    for r in records {
        if r.f.len() != 2 {
            return Err(ExplorerError::BrokenChain(format!(
                "chains cover two-objective fronts; record {} has {} objectives",
                r.id,
                r.f.len()
            )));
        }
    }

    let mut by_id: HashMap<u64, usize> = HashMap::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if by_id.insert(r.id, i).is_some() {
            return Err(ExplorerError::BrokenChain(format!("duplicate record id {}", r.id)));
        }
    }
    let seeds = records.iter().filter(|r| r.parent_id.is_none()).count();
    if seeds != 1 {
        return Err(ExplorerError::BrokenChain(format!(
            "expected exactly one seed record, found {seeds}"
        )));
    }
    for r in records {
        let mut current = r;
        let mut hops = 0;
        while let Some(pid) = current.parent_id {
            let Some(&pi) = by_id.get(&pid) else {
                return Err(ExplorerError::BrokenChain(format!(
                    "record {} links to missing parent {pid}",
                    current.id
                )));
            };
            current = &records[pi];
            hops += 1;
            if hops > records.len() {
                return Err(ExplorerError::BrokenChain("parent links contain a cycle".into()));
            }
        }
    }

    let mut nodes: Vec<FrontNode> = records.iter().map(FrontNode::from_record).collect();
    nodes.sort_by(|a, b| {
        a.f[0]
            .partial_cmp(&b.f[0])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.id.cmp(&b.id))
    });

    for pair in nodes.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ra = &records[by_id[&a.id]];
        let rb = &records[by_id[&b.id]];
        let linked = ra.parent_id == Some(b.id) || rb.parent_id == Some(a.id);
        if !linked {
            return Err(ExplorerError::BrokenChain(format!(
                "records {} and {} are adjacent in objective order but not parent-linked",
                a.id, b.id
            )));
        }
    }

    let knots = if nodes.len() == 1 {
        vec![0.0]
    } else {
        let gaps: Vec<f64> = nodes
            .windows(2)
            .map(|pair| {
                pair[0]
                    .f
                    .as_slice()
                    .iter()
                    .zip(pair[1].f.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        if gaps.iter().any(|&g| g == 0.0) {
            (0..nodes.len())
                .map(|i| -1.0 + 2.0 * i as f64 / (nodes.len() - 1) as f64)
                .collect()
        } else {
            let total: f64 = gaps.iter().sum();
            let mut knots = Vec::with_capacity(nodes.len());
            let mut cumulative = 0.0;
            knots.push(-1.0);
            for gap in &gaps {
                cumulative += gap;
                knots.push(-1.0 + 2.0 * cumulative / total);
            }
            knots
        }
    };

    Ok(FrontParametrization::Chain { nodes, knots })
}

/// Wrap a center record and the children expanded from it into a patch.
/// Every child must carry the center's id as its parent.
pub fn build_patch(
    center: &ParetoRecord,
    children: &[ParetoRecord],
) -> Result<FrontParametrization, ExplorerError> {
    for child in children {
        if child.parent_id != Some(center.id) {
            return Err(ExplorerError::BrokenChain(format!(
                "record {} is not a child of patch center {}",
                child.id, center.id
            )));
        }
    }
    Ok(FrontParametrization::Patch {
        center: FrontNode::from_record(center),
        children: children.iter().map(FrontNode::from_record).collect(),
    })
}

impl FrontParametrization {
    /// Evaluate a chain at t ∈ [−1, 1]: knot values reproduce the stored x
    /// exactly, everything between interpolates the two bracketing nodes.
    pub fn sample_t(&self, t: f64) -> Result<ParamVector, ExplorerError> {
        let FrontParametrization::Chain { nodes, knots } = self else {
            return Err(ExplorerError::Domain(
                "patches are addressed by simplex weights r, not a scalar t".into(),
            ));
        };
        if !t.is_finite() {
            return Err(ExplorerError::Domain(format!("t = {t} is not finite")));
        }
        if nodes.len() == 1 {
            if t.abs() <= DOMAIN_EPS {
                return Ok(nodes[0].x.clone());
            }
            return Err(ExplorerError::Domain(format!(
                "single-node chain only supports t = 0, got {t}"
            )));
        }
        if !(-1.0 - DOMAIN_EPS..=1.0 + DOMAIN_EPS).contains(&t) {
            return Err(ExplorerError::Domain(format!("t = {t} outside [-1, 1]")));
        }
        let t = t.clamp(-1.0, 1.0);
        let hi = match knots.binary_search_by(|k| k.partial_cmp(&t).expect("knots are finite")) {
            Ok(exact) => return Ok(nodes[exact].x.clone()),
            Err(insertion) => insertion,
        };
        // t lies strictly between knots[hi − 1] and knots[hi]: the clamp
        // above pins boundary queries to the exact endpoint knots.
        let lo = hi - 1;
        let weight = (t - knots[lo]) / (knots[hi] - knots[lo]);
        let span = nodes[hi].x.add_scaled(-1.0, &nodes[lo].x);
        Ok(nodes[lo].x.add_scaled(weight, &span))
    }

    /// Evaluate a patch at simplex weights r (one entry per child): the
    /// result is (1 − Σr)·center + Σ rⱼ·childⱼ, so r = 0 is the center and
    /// a one-hot r is that child.
    pub fn sample_r(&self, r: &[f64]) -> Result<ParamVector, ExplorerError> {
        let FrontParametrization::Patch { center, children } = self else {
            return Err(ExplorerError::Domain(
                "chains are addressed by a scalar t, not simplex weights".into(),
            ));
        };
        if r.len() != children.len() {
            return Err(ExplorerError::Domain(format!(
                "{} weights supplied for {} children",
                r.len(),
                children.len()
            )));
        }
        let total: f64 = r.iter().sum();
        if r.iter().any(|&w| !w.is_finite() || w < -DOMAIN_EPS) || total > 1.0 + DOMAIN_EPS {
            return Err(ExplorerError::Domain(format!(
                "weights {r:?} are outside the unit simplex"
            )));
        }
        let mut x = center.x.scaled(1.0 - total);
        for (w, child) in r.iter().zip(children) {
            x = x.add_scaled(*w, &child.x);
        }
        Ok(x)
    }
}

/// One evaluated grid point of a front, with its dominance verdict.
#[derive(Clone, Debug)]
pub struct SampledPoint {
    pub t: f64,
    pub x: ParamVector,
    pub f: ObjectiveValues,
    /// False when some other sample in the stitched union dominates this one.
    pub kept: bool,
}

/// A maximal cropped t-interval of one front.
#[derive(Clone, Debug, PartialEq)]
pub struct CropSpan {
    pub front: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// A handoff point: where `from_front` stops being non-dominated, and which
/// front's samples take over.
#[derive(Clone, Debug, PartialEq)]
pub struct StitchPoint {
    pub from_front: usize,
    pub to_front: usize,
    pub t: f64,
}

/// Several fronts sampled on a common grid, with dominated spans cropped.
#[derive(Clone, Debug)]
pub struct StitchedFront {
    pub fronts: Vec<FrontParametrization>,
    /// Grid samples per front, ascending in t.
    pub samples: Vec<Vec<SampledPoint>>,
    pub stitch_points: Vec<StitchPoint>,
    pub crop_log: Vec<CropSpan>,
}

impl StitchedFront {
    /// Kept samples across all fronts, in (front, t) order.
    pub fn retained(&self) -> Vec<(usize, &SampledPoint)> {
        self.samples
            .iter()
            .enumerate()
            .flat_map(|(fi, row)| row.iter().filter(|s| s.kept).map(move |s| (fi, s)))
            .collect()
    }
}

/// Sample each chain at `grid` evenly spaced t values (single-node chains at
/// their lone t = 0), evaluate the interpolated parameter vectors through the
/// problem — costing one objective evaluation per grid point per front — and
/// mark every sample dominated by any other sample in the union as cropped.
///
/// The retained union is therefore mutually non-dominated at the grid
/// resolution. Contiguous cropped runs are logged as spans; where a kept
/// sample borders a cropped run, a stitch point records which front's
/// samples dominate the handoff.
pub fn stitch_fronts(
    problem: &ProblemHandle,
    fronts: Vec<FrontParametrization>,
    grid: usize,
) -> Result<StitchedFront, ExplorerError> {
    if fronts.is_empty() {
        return Err(ExplorerError::InvalidConfig(
            "stitching needs at least one front".into(),
        ));
    }
    if grid < 2 {
        return Err(ExplorerError::InvalidConfig(format!(
            "stitch grid needs at least 2 points, got {grid}"
        )));
    }

    let mut samples: Vec<Vec<SampledPoint>> = Vec::with_capacity(fronts.len());
    for front in &fronts {
        let ts: Vec<f64> = match front {
            FrontParametrization::Patch { .. } => {
                return Err(ExplorerError::Domain(
                    "stitching is defined over chains; patches have no scalar grid".into(),
                ))
            }
            FrontParametrization::Chain { nodes, .. } if nodes.len() == 1 => vec![0.0],
            FrontParametrization::Chain { .. } => (0..grid)
                .map(|j| -1.0 + 2.0 * j as f64 / (grid - 1) as f64)
                .collect(),
        };
        let mut row = Vec::with_capacity(ts.len());
        for t in ts {
            let x = front.sample_t(t)?;
            let f = problem.evaluate(&x)?;
            row.push(SampledPoint { t, x, f, kept: true });
        }
        samples.push(row);
    }

    let dominator_of = |fi: usize, si: usize| -> Result<Option<usize>, ExplorerError> {
        for (fj, row) in samples.iter().enumerate() {
            for (sj, other) in row.iter().enumerate() {
                if (fi, si) != (fj, sj) && dominates(&other.f, &samples[fi][si].f)? {
                    return Ok(Some(fj));
                }
            }
        }
        Ok(None)
    };

    let mut kept_flags: Vec<Vec<bool>> = Vec::with_capacity(samples.len());
    for fi in 0..samples.len() {
        let mut flags = Vec::with_capacity(samples[fi].len());
        for si in 0..samples[fi].len() {
            flags.push(dominator_of(fi, si)?.is_none());
        }
        kept_flags.push(flags);
    }

    let mut crop_log = Vec::new();
    let mut stitch_points = Vec::new();
    for (fi, flags) in kept_flags.iter().enumerate() {
        let mut si = 0;
        while si < flags.len() {
            if flags[si] {
                si += 1;
                continue;
            }
            let start = si;
            while si < flags.len() && !flags[si] {
                si += 1;
            }
            crop_log.push(CropSpan {
                front: fi,
                t_start: samples[fi][start].t,
                t_end: samples[fi][si - 1].t,
            });
            // handoffs only exist where a kept sample borders the run
            let mut edges = Vec::new();
            if start > 0 {
                edges.push(start);
            }
            if si < flags.len() {
                edges.push(si - 1);
            }
            for edge in edges {
                let to_front = dominator_of(fi, edge)?
                    .expect("cropped samples have a dominator by construction");
                stitch_points.push(StitchPoint {
                    from_front: fi,
                    to_front,
                    t: samples[fi][edge].t,
                });
            }
        }
    }

    for (row, flags) in samples.iter_mut().zip(&kept_flags) {
        for (sample, &kept) in row.iter_mut().zip(flags) {
            sample.kept = kept;
        }
    }

    Ok(StitchedFront {
        fronts,
        samples,
        stitch_points,
        crop_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{explore, ExplorationConfig};
    use moo_benchmarks::Zdt2Variant;
    use moo_core::{CoreError, GradientMatrix, ProblemOracle, Stage};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn record(id: u64, parent: Option<u64>, x: &[f64], f: &[f64]) -> ParetoRecord {
        ParetoRecord {
            id,
            x: ParamVector::new(x.to_vec()),
            f: ObjectiveValues::new(f.to_vec()),
            grads: None,
            alpha: None,
            parent_id: parent,
            stage: Stage::Expanded,
        }
    }

    /// Objectives equal to the coordinates: lets tests place objective
    /// values anywhere by choosing x.
    struct CoordinateObjectives;

    impl ProblemOracle for CoordinateObjectives {
        fn n(&self) -> usize {
            2
        }
        fn m(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CoreError> {
            Ok(x.to_vec())
        }
        fn gradients(&self, _x: &[f64]) -> Result<GradientMatrix, CoreError> {
            GradientMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        }
        fn hvp(&self, _x: &[f64], _alpha: &[f64], _v: &[f64]) -> Result<Vec<f64>, CoreError> {
            Ok(vec![0.0, 0.0])
        }
    }

    fn planar_record(id: u64, parent: Option<u64>, f: &[f64]) -> ParetoRecord {
        record(id, parent, f, f)
    }

    #[test]
    fn knots_follow_objective_space_arc_length() {
        let records = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 2.0]),
            record(1, Some(0), &[1.0, 0.0], &[1.0, 1.0]),
            record(2, Some(1), &[2.0, 0.0], &[3.0, -1.0]),
        ];
        let chain = build_chain(&records).unwrap();
        let FrontParametrization::Chain { nodes, knots } = &chain else {
            panic!("chain expected");
        };
        assert_eq!(nodes.iter().map(|n| n.id).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(knots[0], -1.0);
        assert_eq!(knots[2], 1.0);
        // segment lengths √2 and 2√2 put the middle knot at −1 + 2·(1/3)
        assert!((knots[1] - (-1.0 / 3.0)).abs() <= 1e-12, "got {}", knots[1]);
    }

    #[test]
    fn chain_orders_by_first_objective_regardless_of_input_order() {
        let records = vec![
            record(2, Some(1), &[2.0, 0.0], &[3.0, -1.0]),
            record(0, None, &[0.0, 0.0], &[0.0, 2.0]),
            record(1, Some(0), &[1.0, 0.0], &[1.0, 1.0]),
        ];
        let chain = build_chain(&records).unwrap();
        let FrontParametrization::Chain { nodes, .. } = &chain else {
            panic!("chain expected");
        };
        let f1: Vec<f64> = nodes.iter().map(|n| n.f[0]).collect();
        assert_eq!(f1, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn single_record_collapses_the_domain_to_zero() {
        let records = vec![record(0, None, &[4.0, 5.0], &[1.0, 1.0])];
        let chain = build_chain(&records).unwrap();
        assert_eq!(chain.sample_t(0.0).unwrap().as_slice(), &[4.0, 5.0]);
        assert!(matches!(chain.sample_t(0.5), Err(ExplorerError::Domain(_))));
    }

    #[test]
    fn sampling_at_a_knot_returns_the_stored_vector_exactly() {
        let records = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 2.0]),
            record(1, Some(0), &[2.0, 2.0], &[1.0, 1.0]),
            record(2, Some(1), &[5.0, -1.0], &[3.0, -1.0]),
        ];
        let chain = build_chain(&records).unwrap();
        let FrontParametrization::Chain { knots, .. } = &chain else {
            panic!("chain expected");
        };
        let mid_knot = knots[1];
        assert_eq!(
            chain.sample_t(mid_knot).unwrap().as_slice(),
            &[2.0, 2.0],
            "knot queries must reproduce the stored x bitwise"
        );
        assert_eq!(chain.sample_t(-1.0).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(chain.sample_t(1.0).unwrap().as_slice(), &[5.0, -1.0]);
    }

    #[test]
    fn sampling_midway_averages_the_bracketing_vectors() {
        let records = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 1.0]),
            record(1, Some(0), &[2.0, 4.0], &[1.0, 0.0]),
        ];
        let chain = build_chain(&records).unwrap();
        let x = chain.sample_t(0.0).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0], "halfway between the two knots");
    }

    #[test]
    fn out_of_domain_queries_are_rejected() {
        let records = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 1.0]),
            record(1, Some(0), &[2.0, 4.0], &[1.0, 0.0]),
        ];
        let chain = build_chain(&records).unwrap();
        assert!(matches!(chain.sample_t(1.5), Err(ExplorerError::Domain(_))));
        assert!(matches!(chain.sample_t(f64::NAN), Err(ExplorerError::Domain(_))));
        assert!(matches!(chain.sample_r(&[0.5]), Err(ExplorerError::Domain(_))));
        // boundary slack: barely outside is clamped rather than rejected
        assert!(chain.sample_t(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn broken_structures_are_rejected() {
        let orphaned = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 1.0]),
            record(1, Some(9), &[1.0, 0.0], &[1.0, 0.0]),
        ];
        assert!(matches!(build_chain(&orphaned), Err(ExplorerError::BrokenChain(_))));

        let two_seeds = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 1.0]),
            record(1, None, &[1.0, 0.0], &[1.0, 0.0]),
        ];
        assert!(matches!(build_chain(&two_seeds), Err(ExplorerError::BrokenChain(_))));

        let duplicate_ids = vec![
            record(0, None, &[0.0, 0.0], &[0.0, 1.0]),
            record(0, Some(0), &[1.0, 0.0], &[1.0, 0.0]),
        ];
        assert!(matches!(build_chain(&duplicate_ids), Err(ExplorerError::BrokenChain(_))));

        // adjacent in objective order but expanded from different parents
        let star = vec![
            record(0, None, &[0.0, 0.0], &[1.0, 1.0]),
            record(1, Some(0), &[1.0, 0.0], &[0.0, 2.0]),
            record(2, Some(0), &[2.0, 0.0], &[2.0, 0.0]),
            record(3, Some(0), &[3.0, 0.0], &[3.0, -1.0]),
        ];
        assert!(matches!(build_chain(&star), Err(ExplorerError::BrokenChain(_))));

        assert!(matches!(build_chain(&[]), Err(ExplorerError::BrokenChain(_))));
    }

    #[test]
    fn patch_interpolates_center_toward_children() {
        let center = record(0, None, &[1.0, 1.0], &[0.5, 0.5]);
        let children = vec![
            record(1, Some(0), &[2.0, 0.0], &[0.2, 0.9]),
            record(2, Some(0), &[0.0, 2.0], &[0.9, 0.2]),
        ];
        let patch = build_patch(&center, &children).unwrap();
        assert_eq!(patch.sample_r(&[0.0, 0.0]).unwrap().as_slice(), &[1.0, 1.0]);
        assert_eq!(patch.sample_r(&[1.0, 0.0]).unwrap().as_slice(), &[2.0, 0.0]);
        assert_eq!(patch.sample_r(&[0.5, 0.0]).unwrap().as_slice(), &[1.5, 0.5]);
        assert!(matches!(patch.sample_r(&[0.7, 0.7]), Err(ExplorerError::Domain(_))));
        assert!(matches!(patch.sample_r(&[-0.1, 0.0]), Err(ExplorerError::Domain(_))));
        assert!(matches!(patch.sample_r(&[1.0]), Err(ExplorerError::Domain(_))));
        assert!(matches!(patch.sample_t(0.0), Err(ExplorerError::Domain(_))));
    }

    #[test]
    fn patch_rejects_children_of_other_parents() {
        let center = record(0, None, &[1.0, 1.0], &[0.5, 0.5]);
        let stranger = vec![record(1, Some(7), &[2.0, 0.0], &[0.2, 0.9])];
        assert!(matches!(
            build_patch(&center, &stranger),
            Err(ExplorerError::BrokenChain(_))
        ));
    }

    #[test]
    fn single_front_is_returned_unchanged() {
        let problem = ProblemHandle::new(Arc::new(CoordinateObjectives));
        let chain = build_chain(&[
            planar_record(0, None, &[0.0, 6.0]),
            planar_record(1, Some(0), &[6.0, 0.0]),
        ])
        .unwrap();
        let stitched = stitch_fronts(&problem, vec![chain], 21).unwrap();
        assert!(stitched.crop_log.is_empty());
        assert!(stitched.stitch_points.is_empty());
        assert_eq!(stitched.retained().len(), 21, "every sample kept");
    }

    #[test]
    fn disjoint_fronts_are_both_fully_retained() {
        let problem = ProblemHandle::new(Arc::new(CoordinateObjectives));
        let upper = build_chain(&[
            planar_record(0, None, &[0.0, 10.0]),
            planar_record(1, Some(0), &[1.0, 9.0]),
        ])
        .unwrap();
        let lower = build_chain(&[
            planar_record(0, None, &[5.0, 3.0]),
            planar_record(1, Some(0), &[6.0, 2.0]),
        ])
        .unwrap();
        let stitched = stitch_fronts(&problem, vec![upper, lower], 21).unwrap();
        assert!(stitched.crop_log.is_empty());
        assert!(stitched.stitch_points.is_empty());
        assert_eq!(stitched.retained().len(), 42);
    }

    #[test]
    fn dominated_span_is_cropped_with_a_stitch_point() {
        let problem = ProblemHandle::new(Arc::new(CoordinateObjectives));
        // front 0: the line f1 + f2 = 6 over f1 ∈ [0, 6]
        let weaker = build_chain(&[
            planar_record(0, None, &[0.0, 6.0]),
            planar_record(1, Some(0), &[6.0, 0.0]),
        ])
        .unwrap();
        // front 1: the better line f1 + f2 = 4 over f1 ∈ [3, 7]
        let stronger = build_chain(&[
            planar_record(0, None, &[3.0, 1.0]),
            planar_record(1, Some(0), &[7.0, -3.0]),
        ])
        .unwrap();
        let stitched = stitch_fronts(&problem, vec![weaker, stronger], 21).unwrap();

        // front 0 samples its line at f1 = 0, 0.3, …, 6; everything from
        // f1 = 3 on is dominated by front 1
        let kept: Vec<bool> = stitched.samples[0].iter().map(|s| s.kept).collect();
        assert_eq!(kept.iter().filter(|&&k| k).count(), 10);
        assert!(kept[..10].iter().all(|&k| k) && kept[10..].iter().all(|&k| !k));
        assert!(stitched.samples[1].iter().all(|s| s.kept), "stronger front untouched");

        assert_eq!(
            stitched.crop_log,
            vec![CropSpan {
                front: 0,
                t_start: stitched.samples[0][10].t,
                t_end: 1.0,
            }]
        );
        assert_eq!(
            stitched.stitch_points,
            vec![StitchPoint {
                from_front: 0,
                to_front: 1,
                t: stitched.samples[0][10].t,
            }]
        );

        // the retained union is mutually non-dominated (brute force)
        let retained = stitched.retained();
        for (i, (_, a)) in retained.iter().enumerate() {
            for (j, (_, b)) in retained.iter().enumerate() {
                if i != j {
                    assert!(
                        !dominates(&a.f, &b.f).unwrap(),
                        "{:?} dominates {:?}",
                        a.f,
                        b.f
                    );
                }
            }
        }
    }

    #[test]
    fn fully_dominated_front_is_cropped_without_stitch_points() {
        let problem = ProblemHandle::new(Arc::new(CoordinateObjectives));
        let weaker = build_chain(&[
            planar_record(0, None, &[0.0, 10.0]),
            planar_record(1, Some(0), &[10.0, 0.0]),
        ])
        .unwrap();
        let stronger = build_chain(&[
            planar_record(0, None, &[0.0, 8.0]),
            planar_record(1, Some(0), &[8.0, 0.0]),
        ])
        .unwrap();
        let stitched = stitch_fronts(&problem, vec![weaker, stronger], 21).unwrap();
        assert!(stitched.samples[0].iter().all(|s| !s.kept));
        assert!(stitched.samples[1].iter().all(|s| s.kept));
        assert_eq!(
            stitched.crop_log,
            vec![CropSpan { front: 0, t_start: -1.0, t_end: 1.0 }]
        );
        assert!(
            stitched.stitch_points.is_empty(),
            "no kept sample borders the cropped run"
        );
    }

    #[test]
    fn stitch_preconditions_are_enforced() {
        let problem = ProblemHandle::new(Arc::new(CoordinateObjectives));
        let chain = build_chain(&[
            planar_record(0, None, &[0.0, 6.0]),
            planar_record(1, Some(0), &[6.0, 0.0]),
        ])
        .unwrap();
        assert!(matches!(
            stitch_fronts(&problem, vec![], 21),
            Err(ExplorerError::InvalidConfig(_))
        ));
        assert!(matches!(
            stitch_fronts(&problem, vec![chain.clone()], 1),
            Err(ExplorerError::InvalidConfig(_))
        ));
        let center = record(0, None, &[1.0, 1.0], &[0.5, 0.5]);
        let patch = build_patch(&center, &[]).unwrap();
        assert!(matches!(
            stitch_fronts(&problem, vec![patch], 21),
            Err(ExplorerError::Domain(_))
        ));
    }

    #[test]
    fn explored_chain_is_monotone_after_crop() {
        let problem = ProblemHandle::new(Arc::new(Zdt2Variant));
        let mut seed_rng = ChaCha8Rng::seed_from_u64(5);
        let x0 = Zdt2Variant::sample_seed(&mut seed_rng);
        let outcome = explore(
            &problem,
            &x0,
            &ExplorationConfig {
                budget: 8,
                rng_seed: 0,
                ..ExplorationConfig::default()
            },
        )
        .unwrap();
        let chain = build_chain(&outcome.records).unwrap();
        let stitched = stitch_fronts(&problem, vec![chain], 51).unwrap();
        let retained = stitched.retained();
        assert!(!retained.is_empty());
        for pair in retained.windows(2) {
            let (a, b) = (pair[0].1, pair[1].1);
            assert!(
                b.f[0] >= a.f[0],
                "f1 must be non-decreasing in t: {} then {}",
                a.f[0],
                b.f[0]
            );
            assert!(
                b.f[1] <= a.f[1],
                "f2 must be non-increasing in t: {} then {}",
                a.f[1],
                b.f[1]
            );
        }
    }
}
