use crate::{CoreError, ObjectiveValues};

/// Pareto dominance for minimization: `a` dominates `b` iff a ≤ b elementwise
/// and a ≠ b. Exact floating-point comparison, no epsilon.
pub fn dominates(a: &ObjectiveValues, b: &ObjectiveValues) -> Result<bool, CoreError> {
    if a.len() != b.len() {
        return Err(CoreError::dim("dominance comparison", a.len(), b.len()));
    }
    let mut strict = false;
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        if x > y {
            return Ok(false);
        }
        if x < y {
            strict = true;
        }
    }
    Ok(strict)
}

/// Indices of points not dominated by any other point, in input order.
/// Duplicates are all retained (equal points never dominate each other).
pub fn nondominated_filter(points: &[ObjectiveValues]) -> Result<Vec<usize>, CoreError> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let m = first.len();
    for p in points {
        if p.len() != m {
            return Err(CoreError::dim("nondominated filter", m, p.len()));
        }
    }
    let mut keep = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && dominates(q, p)? {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    Ok(keep)
}
