//! Per-stage evaluation-cost tables.
//!
//! Pipelines meter objective, gradient, and Hessian-vector calls per stage
//! (e.g. expansion vs. re-optimization). [`cost_report`] merges stage
//! snapshots — summing duplicates componentwise, so counters from several
//! workers or runs can be thrown in as-is — and renders them as an aligned
//! text table or JSON.

use std::collections::HashMap;

use moo_core::CostSnapshot;
use serde::{Deserialize, Serialize};

/// One stage's call counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRow {
    pub stage: String,
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hvp: u64,
}

/// Stage-by-stage cost table; rows keep first-appearance order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub rows: Vec<CostRow>,
}

/// Merges `(stage, counters)` entries into a report, summing entries that
/// share a stage name componentwise.
pub fn cost_report<S: AsRef<str>>(entries: &[(S, CostSnapshot)]) -> CostReport {
    let mut order: Vec<String> = Vec::new();
    let mut merged: HashMap<String, CostSnapshot> = HashMap::new();
    for (stage, snapshot) in entries {
        let key = stage.as_ref().to_string();
        match merged.entry(key.clone()) {
            std::collections::hash_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() = *slot.get() + *snapshot;
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(*snapshot);
                order.push(key);
            }
        }
    }
    CostReport {
        rows: order
            .into_iter()
            .map(|stage| {
                let s = merged[&stage];
                CostRow { stage, n_f: s.n_f, n_grad: s.n_grad, n_hvp: s.n_hvp }
            })
            .collect(),
    }
}

impl CostReport {
    /// Componentwise sum over all rows.
    pub fn total(&self) -> CostSnapshot {
        self.rows.iter().fold(CostSnapshot::default(), |acc, r| {
            acc + CostSnapshot::new(r.n_f, r.n_grad, r.n_hvp)
        })
    }

    /// Renders the report as an aligned text table; always includes the
    /// header line, even when there are no rows.
    pub fn to_text_table(&self) -> String {
        const HEADERS: [&str; 4] = ["stage", "#f", "#∇f", "#∇²f"];
        let cells: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.stage.clone(),
                    r.n_f.to_string(),
                    r.n_grad.to_string(),
                    r.n_hvp.to_string(),
                ]
            })
            .collect();
        let mut widths = [0usize; 4];
        for (c, header) in HEADERS.iter().enumerate() {
            widths[c] = header.chars().count();
            for row in &cells {
                widths[c] = widths[c].max(row[c].chars().count());
            }
        }
        let render = |vals: [&str; 4]| {
            format!(
                "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                vals[0],
                vals[1],
                vals[2],
                vals[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3],
            )
        };
        let mut lines = vec![render(HEADERS)];
        for row in &cells {
            lines.push(render([&row[0], &row[1], &row[2], &row[3]]));
        }
        lines.join("\n")
    }

    /// Renders the report as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("a cost report always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_and_optimization_stages_become_two_rows() {
        let report = cost_report(&[
            ("exp", CostSnapshot::new(0, 50, 300)),
            ("opt", CostSnapshot::new(100, 100, 0)),
        ]);
        assert_eq!(
            report.rows,
            vec![
                CostRow { stage: "exp".into(), n_f: 0, n_grad: 50, n_hvp: 300 },
                CostRow { stage: "opt".into(), n_f: 100, n_grad: 100, n_hvp: 0 },
            ]
        );
        assert_eq!(report.total(), CostSnapshot::new(100, 150, 300));
    }

    #[test]
    fn duplicate_stage_names_merge_componentwise() {
        let report = cost_report(&[
            ("opt", CostSnapshot::new(10, 10, 0)),
            ("exp", CostSnapshot::new(0, 5, 30)),
            ("opt", CostSnapshot::new(7, 3, 1)),
        ]);
        assert_eq!(
            report.rows,
            vec![
                CostRow { stage: "opt".into(), n_f: 17, n_grad: 13, n_hvp: 1 },
                CostRow { stage: "exp".into(), n_f: 0, n_grad: 5, n_hvp: 30 },
            ],
            "rows keep first-appearance order and sum duplicates"
        );
    }

    #[test]
    fn empty_input_gives_an_empty_table() {
        let report = cost_report::<&str>(&[]);
        assert!(report.rows.is_empty());
        assert_eq!(report.total(), CostSnapshot::default());
        let text = report.to_text_table();
        assert_eq!(text.lines().count(), 1, "only the header remains: {text:?}");
    }

    #[test]
    fn text_table_aligns_its_columns() {
        let report = cost_report(&[
            ("expand", CostSnapshot::new(0, 50, 300)),
            ("opt", CostSnapshot::new(12345, 1, 0)),
        ]);
        let text = report.to_text_table();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("stage") && lines[0].contains("#∇²f"));
        let widths: Vec<usize> = lines.iter().map(|l| l.chars().count()).collect();
        assert!(
            widths.iter().all(|w| *w == widths[0]),
            "every line pads to the same width: {text}"
        );
        assert!(lines[1].starts_with("expand"));
        assert!(lines[2].starts_with("opt"));
    }

    #[test]
    fn json_round_trips_losslessly() {
        let report = cost_report(&[("exp", CostSnapshot::new(0, 50, 300))]);
        let back: CostReport = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
