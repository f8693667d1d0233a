//! Versioned CSV tables.
//!
//! Every file carries its schema string in the leading `schema` column of
//! each row, so a consumer can reject files it does not understand without
//! out-of-band metadata. Records and their parameter vectors live in
//! separate files (`records.csv` / `params.csv`) because n is often much
//! larger than m; the pair is joined on (run_id, record_id). Floats are
//! written with the shortest representation that parses back bit-identically.

use std::collections::HashMap;
use std::path::Path;

use moo_core::{ParetoRecord, Stage};

use crate::CliFailure;

pub const RECORDS_SCHEMA: &str = "records-v1";
pub const PARAMS_SCHEMA: &str = "params-v1";
pub const SAMPLES_SCHEMA: &str = "samples-v1";
pub const RECORDS_FILE: &str = "records.csv";
pub const PARAMS_FILE: &str = "params.csv";
pub const SAMPLES_FILE: &str = "samples.csv";

const RECORD_COLUMNS: [&str; 6] = [
    "schema",
    "run_id",
    "record_id",
    "parent_id",
    "stage",
    "residual",
];
const PARAM_COLUMNS: [&str; 3] = ["schema", "run_id", "record_id"];

/// One parsed row of a records file.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordRow {
    pub run_id: String,
    pub record_id: u64,
    pub parent_id: Option<u64>,
    pub stage: Stage,
    pub residual: Option<f64>,
    pub f: Vec<f64>,
}

/// One sampled point of a parametrized front.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub front: usize,
    pub t: f64,
    pub kept: bool,
    pub f: Vec<f64>,
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliFailure> {
    csv::Writer::from_path(path)
        .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
}

fn write_row(
    w: &mut csv::Writer<std::fs::File>,
    path: &Path,
    row: &[String],
) -> Result<(), CliFailure> {
    w.write_record(row)
        .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
}

/// Writes `schema, run_id, record_id, parent_id, stage, residual, f_1..f_m`.
pub fn write_records(
    path: &Path,
    run_id: &str,
    records: &[ParetoRecord],
) -> Result<(), CliFailure> {
    let m = records.first().map_or(0, |r| r.f.len());
    let mut w = writer(path)?;
    let mut header: Vec<String> = RECORD_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((1..=m).map(|i| format!("f_{i}")));
    write_row(&mut w, path, &header)?;
    for rec in records {
        let mut row = vec![
            RECORDS_SCHEMA.to_string(),
            run_id.to_string(),
            rec.id.to_string(),
            rec.parent_id.map(|p| p.to_string()).unwrap_or_default(),
            rec.stage.to_string(),
            rec.residual().map(|r| r.to_string()).unwrap_or_default(),
        ];
        row.extend(rec.f.as_slice().iter().map(|v| v.to_string()));
        write_row(&mut w, path, &row)?;
    }
    w.flush()
        .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
}

/// Writes the parameter sidecar `schema, run_id, record_id, x_1..x_n`.
pub fn write_params(
    path: &Path,
    run_id: &str,
    records: &[ParetoRecord],
) -> Result<(), CliFailure> {
    let n = records.first().map_or(0, |r| r.x.len());
    let mut w = writer(path)?;
    let mut header: Vec<String> = PARAM_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((1..=n).map(|i| format!("x_{i}")));
    write_row(&mut w, path, &header)?;
    for rec in records {
        let mut row = vec![
            PARAMS_SCHEMA.to_string(),
            run_id.to_string(),
            rec.id.to_string(),
        ];
        row.extend(rec.x.as_slice().iter().map(|v| v.to_string()));
        write_row(&mut w, path, &row)?;
    }
    w.flush()
        .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
}

/// Writes sampled front points `schema, run_id, front, t, kept, f_1..f_m`.
pub fn write_samples(path: &Path, run_id: &str, rows: &[SampleRow]) -> Result<(), CliFailure> {
    let m = rows.first().map_or(0, |r| r.f.len());
    let mut w = writer(path)?;
    let mut header: Vec<String> = ["schema", "run_id", "front", "t", "kept"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=m).map(|i| format!("f_{i}")));
    write_row(&mut w, path, &header)?;
    for s in rows {
        let mut row = vec![
            SAMPLES_SCHEMA.to_string(),
            run_id.to_string(),
            s.front.to_string(),
            s.t.to_string(),
            s.kept.to_string(),
        ];
        row.extend(s.f.iter().map(|v| v.to_string()));
        write_row(&mut w, path, &row)?;
    }
    w.flush()
        .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliFailure> {
    csv::Reader::from_path(path)
        .map_err(|e| CliFailure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn check_header(
    path: &Path,
    headers: &csv::StringRecord,
    fixed: &[&str],
    series_prefix: &str,
) -> Result<usize, CliFailure> {
    for (i, name) in fixed.iter().enumerate() {
        if headers.get(i) != Some(*name) {
            return Err(CliFailure::Usage(format!(
                "{}: expected column {} to be `{name}`, found `{}`",
                path.display(),
                i + 1,
                headers.get(i).unwrap_or("<missing>")
            )));
        }
    }
    let series = headers.len().saturating_sub(fixed.len());
    if series == 0 {
        return Err(CliFailure::Usage(format!(
            "{}: no `{series_prefix}_…` columns found",
            path.display()
        )));
    }
    for j in 0..series {
        let expected = format!("{series_prefix}_{}", j + 1);
        if headers.get(fixed.len() + j) != Some(expected.as_str()) {
            return Err(CliFailure::Usage(format!(
                "{}: expected column {} to be `{expected}`, found `{}`",
                path.display(),
                fixed.len() + j + 1,
                headers.get(fixed.len() + j).unwrap_or("<missing>")
            )));
        }
    }
    Ok(series)
}

fn field<'a>(path: &Path, row: &'a csv::StringRecord, idx: usize) -> Result<&'a str, CliFailure> {
    row.get(idx).ok_or_else(|| {
        CliFailure::Usage(format!("{}: row is missing column {}", path.display(), idx + 1))
    })
}

fn parse_f64(path: &Path, raw: &str, what: &str) -> Result<f64, CliFailure> {
    raw.parse::<f64>().map_err(|_| {
        CliFailure::Usage(format!("{}: `{raw}` is not a float ({what})", path.display()))
    })
}

/// Reads a records file back, validating schema and column layout.
pub fn read_records(path: &Path) -> Result<Vec<RecordRow>, CliFailure> {
    let mut r = reader(path)?;
    let headers = r
        .headers()
        .map_err(|e| CliFailure::Usage(format!("{}: {e}", path.display())))?
        .clone();
    let m = check_header(path, &headers, &RECORD_COLUMNS, "f")?;
    let mut rows = Vec::new();
    for item in r.records() {
        let row = item.map_err(|e| CliFailure::Usage(format!("{}: {e}", path.display())))?;
        let schema = field(path, &row, 0)?;
        if schema != RECORDS_SCHEMA {
            return Err(CliFailure::Usage(format!(
                "{}: unrecognized records schema `{schema}` (this build reads {RECORDS_SCHEMA})",
                path.display()
            )));
        }
        let record_id = field(path, &row, 2)?.parse::<u64>().map_err(|_| {
            CliFailure::Usage(format!("{}: bad record_id", path.display()))
        })?;
        let parent_raw = field(path, &row, 3)?;
        let parent_id = if parent_raw.is_empty() {
            None
        } else {
            Some(parent_raw.parse::<u64>().map_err(|_| {
                CliFailure::Usage(format!("{}: bad parent_id", path.display()))
            })?)
        };
        let stage = field(path, &row, 4)?
            .parse::<Stage>()
            .map_err(|e| CliFailure::Usage(format!("{}: {e}", path.display())))?;
        let residual_raw = field(path, &row, 5)?;
        let residual = if residual_raw.is_empty() {
            None
        } else {
            Some(parse_f64(path, residual_raw, "residual")?)
        };
        let mut f = Vec::with_capacity(m);
        for j in 0..m {
            f.push(parse_f64(path, field(path, &row, 6 + j)?, "objective value")?);
        }
        rows.push(RecordRow {
            run_id: field(path, &row, 1)?.to_string(),
            record_id,
            parent_id,
            stage,
            residual,
            f,
        });
    }
    Ok(rows)
}

/// Reads a parameter sidecar into a (run_id, record_id) → x map.
pub fn read_params(path: &Path) -> Result<HashMap<(String, u64), Vec<f64>>, CliFailure> {
    let mut r = reader(path)?;
    let headers = r
        .headers()
        .map_err(|e| CliFailure::Usage(format!("{}: {e}", path.display())))?
        .clone();
    let n = check_header(path, &headers, &PARAM_COLUMNS, "x")?;
    let mut map = HashMap::new();
    for item in r.records() {
        let row = item.map_err(|e| CliFailure::Usage(format!("{}: {e}", path.display())))?;
        let schema = field(path, &row, 0)?;
        if schema != PARAMS_SCHEMA {
            return Err(CliFailure::Usage(format!(
                "{}: unrecognized params schema `{schema}` (this build reads {PARAMS_SCHEMA})",
                path.display()
            )));
        }
        let run_id = field(path, &row, 1)?.to_string();
        let record_id = field(path, &row, 2)?.parse::<u64>().map_err(|_| {
            CliFailure::Usage(format!("{}: bad record_id", path.display()))
        })?;
        let mut x = Vec::with_capacity(n);
        for j in 0..n {
            x.push(parse_f64(path, field(path, &row, 3 + j)?, "parameter value")?);
        }
        map.insert((run_id, record_id), x);
    }
    Ok(map)
}
