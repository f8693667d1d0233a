//! Implementations of the four subcommands.
//!
//! Shared shape: validate every input *before* touching the filesystem, then
//! create the run directory, write the manifest with its partial flag up,
//! run, flush data files, and rewrite the finished manifest. Numeric
//! failures (stall, divergence) still flush whatever records exist.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use moo_benchmarks::{build_benchmark, BenchmarkError};
use moo_core::{ObjectiveValues, ParamVector, ParetoRecord};
use moo_expansion::BetaStrategy;
use moo_explorer::{
    build_chain, explore, pareto_optimize_mgda, stitch_fronts, weighted_sum_gd,
    ExplorationConfig, ExplorerError, FrontParametrization, OptimizerChoice,
};
use moo_metrics::{default_reference, hv_monte_carlo, hypervolume, HvConfig, HvMode};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{ExploreArgs, FrontArgs, HvArgs, OptimizeArgs};
use crate::manifest::{prepare_run_dir, resolve_out_dir, RunManifest, MANIFEST_FILE};
use crate::tables::{
    read_params, read_records, write_params, write_records, write_samples, SampleRow,
    PARAMS_FILE, RECORDS_FILE, SAMPLES_FILE,
};
use crate::CliFailure;

fn usage(msg: impl Into<String>) -> CliFailure {
    CliFailure::Usage(msg.into())
}

fn explorer_failure(err: ExplorerError) -> CliFailure {
    match err {
        ExplorerError::InvalidConfig(msg) => CliFailure::Usage(msg),
        other => CliFailure::Runtime(other.to_string()),
    }
}

fn benchmark_failure(err: BenchmarkError) -> CliFailure {
    match err {
        BenchmarkError::UnknownBenchmark(_) | BenchmarkError::Config(_) => {
            CliFailure::Usage(err.to_string())
        }
        BenchmarkError::Autodiff(_) => CliFailure::Runtime(err.to_string()),
    }
}

fn parse_f64_list(raw: &str, flag: &str) -> Result<Vec<f64>, CliFailure> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("`{s}` in --{flag} is not a number")))
        })
        .collect()
}

fn parse_usize_list(raw: &str, flag: &str) -> Result<Vec<usize>, CliFailure> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("`{s}` in --{flag} is not a non-negative integer")))
        })
        .collect()
}

fn check_simplex(weights: &[f64], m: usize) -> Result<(), CliFailure> {
    if weights.len() != m {
        return Err(usage(format!(
            "{} weights supplied for {m} objectives",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(usage("weights must be finite and non-negative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(usage(format!("weights must sum to 1, got {sum}")));
    }
    Ok(())
}

fn parse_beta(raw: &str) -> Result<BetaStrategy, CliFailure> {
    match raw {
        "normal" => Ok(BetaStrategy::StandardNormal),
        "convex" => Ok(BetaStrategy::ConvexSpan),
        "coin" => Ok(BetaStrategy::CoinFlipSubset),
        other => match other.strip_prefix("one-hot:") {
            Some(idx) => idx
                .parse::<usize>()
                .map(BetaStrategy::OneHot)
                .map_err(|_| usage(format!("`{idx}` behind one-hot: is not a task index"))),
            None => Err(usage(format!(
                "unknown --beta `{other}` (normal, convex, coin, one-hot:<task>)"
            ))),
        },
    }
}

/// The single --seed flag feeds a splittable generator; everything random
/// downstream draws from these two derived seeds.
fn derive_seeds(seed: u64) -> (u64, u64) {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let bench_seed = master.next_u64();
    let rng_seed = master.next_u64();
    (bench_seed, rng_seed)
}

fn write_record_files(
    dir: &Path,
    run_id: &str,
    records: &[ParetoRecord],
) -> Result<(), CliFailure> {
    write_records(&dir.join(RECORDS_FILE), run_id, records)?;
    write_params(&dir.join(PARAMS_FILE), run_id, records)
}

pub fn cmd_optimize(args: &OptimizeArgs, out: Option<&Path>) -> Result<(), CliFailure> {
    let (bench_seed, _) = derive_seeds(args.seed);
    let instance = build_benchmark(&args.bench, bench_seed).map_err(benchmark_failure)?;
    if args.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    enum Plan {
        Mgda,
        Ws(Vec<f64>),
    }
    let plan = match args.optimizer.as_str() {
        "mgda" => {
            if args.weights.is_some() {
                return Err(usage("--w applies to the ws optimizer only"));
            }
            if !(args.tol > 0.0) {
                return Err(usage(format!("--tol must be positive, got {}", args.tol)));
            }
            Plan::Mgda
        }
        "ws" => {
            let raw = args
                .weights
                .as_ref()
                .ok_or_else(|| usage("the ws optimizer needs --w, e.g. --w 0.5,0.5"))?;
            let weights = parse_f64_list(raw, "w")?;
            check_simplex(&weights, instance.handle.m())?;
            if !(args.lr0 > 0.0) {
                return Err(usage(format!("--lr0 must be positive, got {}", args.lr0)));
            }
            Plan::Ws(weights)
        }
        other => return Err(usage(format!("unknown optimizer `{other}` (mgda, ws)"))),
    };

    let out_root = resolve_out_dir(out);
    let run_id = format!("optimize-{}-seed{}", args.bench, args.seed);
    let dir = prepare_run_dir(&out_root, &run_id)?;
    let config = serde_json::json!({
        "bench": args.bench,
        "optimizer": args.optimizer,
        "tol": args.tol,
        "iters": args.iters,
        "weights": args.weights,
        "lr0": args.lr0,
    });
    let mut manifest = RunManifest::begin(
        "optimize",
        &run_id,
        &args.bench,
        args.seed,
        Some(bench_seed),
        None,
        config,
    );
    manifest.write(&dir)?;

    let started = Instant::now();
    let result = match &plan {
        Plan::Mgda => {
            pareto_optimize_mgda(&instance.handle, &instance.x0, args.tol, args.iters)
                .map(|rec| vec![rec])
        }
        Plan::Ws(weights) => {
            weighted_sum_gd(&instance.handle, &instance.x0, weights, args.lr0, args.iters)
        }
    };
    let wall = started.elapsed().as_secs_f64();
    let counters = BTreeMap::from([("optimize".to_string(), instance.handle.snapshot())]);

    match result {
        Ok(records) => {
            write_record_files(&dir, &run_id, &records)?;
            manifest.finish(counters, wall, false, vec![]);
            manifest.write(&dir)?;
            let last = records.last().expect("optimizers return at least one record");
            println!(
                "{run_id}: {} record(s), final f = {:?} -> {}",
                records.len(),
                last.f.as_slice(),
                dir.display()
            );
            Ok(())
        }
        Err(err) => {
            // numeric failures still flush their best evidence
            let flushed: Vec<ParetoRecord> = match &err {
                ExplorerError::Stalled(rec) => vec![(**rec).clone()],
                ExplorerError::Diverged(trajectory) => trajectory.clone(),
                _ => vec![],
            };
            if !flushed.is_empty() {
                write_record_files(&dir, &run_id, &flushed)?;
            }
            manifest.finish(counters, wall, true, vec![err.to_string()]);
            manifest.write(&dir)?;
            Err(explorer_failure(err))
        }
    }
}

pub fn cmd_explore(args: &ExploreArgs, out: Option<&Path>) -> Result<(), CliFailure> {
    let (bench_seed, rng_seed) = derive_seeds(args.seed);
    let ks = parse_usize_list(&args.krylov, "k")?;
    let ss = parse_f64_list(&args.step, "s")?;
    if ks.iter().any(|k| *k == 0) {
        return Err(usage("--k entries must be at least 1"));
    }
    if ss.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(usage("--s entries must be positive and finite"));
    }
    if args.directions == 0 {
        return Err(usage("--K must be at least 1"));
    }
    if args.budget == 0 {
        return Err(usage("--N must be at least 1"));
    }
    if args.iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    if !(args.tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {}", args.tol)));
    }
    if args.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let beta = parse_beta(&args.beta)?;
    build_benchmark(&args.bench, bench_seed).map_err(benchmark_failure)?;
    if args.workers > 1 {
        eprintln!(
            "note: this build always expands with the deterministic single worker; \
             --workers {} is recorded as 1",
            args.workers
        );
    }

    let out_root = resolve_out_dir(out);
    for &k in &ks {
        for &s in &ss {
            let run_id = format!("explore-{}-seed{}-k{k}-s{s}", args.bench, args.seed);
            // a fresh instance per run keeps oracle counters scoped to it;
            // the shared bench seed keeps sweep runs paired on one start point
            let instance = build_benchmark(&args.bench, bench_seed).map_err(benchmark_failure)?;
            let dir = prepare_run_dir(&out_root, &run_id)?;
            let config_json = serde_json::json!({
                "bench": args.bench,
                "s": s,
                "k": k,
                "K": args.directions,
                "N": args.budget,
                "beta": args.beta,
                "correct": args.correct,
                "tol": args.tol,
                "iters": args.iters,
                "workers": 1,
            });
            let mut manifest = RunManifest::begin(
                "explore",
                &run_id,
                &args.bench,
                args.seed,
                Some(bench_seed),
                Some(rng_seed),
                config_json,
            );
            manifest.write(&dir)?;

            let config = ExplorationConfig {
                step_size: s,
                minres_cap: k,
                directions_per_node: args.directions,
                budget: args.budget,
                beta_strategy: beta,
                use_correction: args.correct,
                optimizer: OptimizerChoice::MgdaLineSearch {
                    tol: args.tol,
                    max_iters: args.iters,
                },
                rng_seed,
            };
            let started = Instant::now();
            let outcome = match explore(&instance.handle, &instance.x0, &config) {
                Ok(outcome) => outcome,
                Err(err) => {
                    let counters =
                        BTreeMap::from([("total".to_string(), instance.handle.snapshot())]);
                    manifest.finish(
                        counters,
                        started.elapsed().as_secs_f64(),
                        true,
                        vec![err.to_string()],
                    );
                    manifest.write(&dir)?;
                    return Err(explorer_failure(err));
                }
            };
            let wall = started.elapsed().as_secs_f64();
            write_record_files(&dir, &run_id, &outcome.records)?;
            let counters = BTreeMap::from([
                ("optimize".to_string(), outcome.costs.optimize),
                ("expand".to_string(), outcome.costs.expand),
                ("total".to_string(), outcome.costs.total()),
            ]);
            manifest.finish(counters, wall, outcome.partial, outcome.warnings.clone());
            manifest.write(&dir)?;
            println!(
                "{run_id}: {} records, {} non-dominated{} -> {}",
                outcome.records.len(),
                outcome.filtered.len(),
                if outcome.partial { ", PARTIAL" } else { "" },
                dir.display()
            );
        }
    }
    Ok(())
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(name),
        _ => PathBuf::from(name),
    }
}

/// Loads records plus their parameter vectors, grouped by run id in
/// first-appearance order.
fn load_record_groups(
    paths: &[PathBuf],
) -> Result<(Vec<(String, Vec<ParetoRecord>)>, Option<(String, u64)>), CliFailure> {
    let mut groups: Vec<(String, Vec<ParetoRecord>)> = Vec::new();
    let mut benchmark: Option<(String, u64)> = None;
    for path in paths {
        let man = RunManifest::read(&sibling(path, MANIFEST_FILE))?;
        let man_seed = man.bench_seed.unwrap_or(0);
        match &benchmark {
            None => benchmark = Some((man.benchmark.clone(), man_seed)),
            Some((id, seed)) => {
                if *id != man.benchmark {
                    return Err(usage(format!(
                        "mixed benchmarks across records files: `{id}` vs `{}`",
                        man.benchmark
                    )));
                }
                if id == "toy-mlp" && man_seed != *seed {
                    return Err(usage(
                        "toy-mlp runs with different benchmark seeds define different \
                         objectives; refusing to mix them",
                    ));
                }
            }
        }
        let rows = read_records(path)?;
        if rows.is_empty() {
            return Err(usage(format!("{}: no records", path.display())));
        }
        let params = read_params(&sibling(path, PARAMS_FILE))?;
        for row in rows {
            let x = params
                .get(&(row.run_id.clone(), row.record_id))
                .ok_or_else(|| {
                    usage(format!(
                        "{}: record {} of run {} has no parameter row",
                        path.display(),
                        row.record_id,
                        row.run_id
                    ))
                })?;
            let rec = ParetoRecord {
                id: row.record_id,
                x: ParamVector::new(x.clone()),
                f: ObjectiveValues::new(row.f),
                grads: None,
                alpha: None,
                parent_id: row.parent_id,
                stage: row.stage,
            };
            match groups.iter_mut().find(|(rid, _)| *rid == row.run_id) {
                Some((_, records)) => records.push(rec),
                None => groups.push((row.run_id, vec![rec])),
            }
        }
    }
    Ok((groups, benchmark))
}

fn chain_json(
    front: &FrontParametrization,
    run_id: &str,
) -> Result<serde_json::Value, CliFailure> {
    let FrontParametrization::Chain { nodes, knots } = front else {
        return Err(CliFailure::Runtime(
            "front parametrizations built from records are always chains".into(),
        ));
    };
    Ok(serde_json::json!({
        "run_id": run_id,
        "knots": knots,
        "nodes": nodes
            .iter()
            .zip(knots)
            .map(|(node, t)| {
                serde_json::json!({
                    "id": node.id,
                    "t": t,
                    "x": node.x.as_slice(),
                    "f": node.f.as_slice(),
                })
            })
            .collect::<Vec<_>>(),
    }))
}

fn grid_ts(front: &FrontParametrization, grid: usize) -> Vec<f64> {
    match front {
        FrontParametrization::Chain { nodes, .. } if nodes.len() == 1 => vec![0.0],
        _ => (0..grid)
            .map(|j| -1.0 + 2.0 * j as f64 / (grid - 1) as f64)
            .collect(),
    }
}

pub fn cmd_front(args: &FrontArgs, out: Option<&Path>) -> Result<(), CliFailure> {
    if args.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let (groups, benchmark) = load_record_groups(&args.records)?;
    let (bench_id, bench_seed) = benchmark.expect("clap requires at least one --records path");
    let mut run_ids = Vec::new();
    let mut chains = Vec::new();
    for (rid, records) in &groups {
        let chain = build_chain(records).map_err(|e| match e {
            ExplorerError::BrokenChain(msg) => usage(format!("run {rid}: {msg}")),
            other => explorer_failure(other),
        })?;
        run_ids.push(rid.clone());
        chains.push(chain);
    }
    let instance = build_benchmark(&bench_id, bench_seed).map_err(benchmark_failure)?;

    let out_root = resolve_out_dir(out);
    let run_id = format!(
        "front-{bench_id}-grid{}{}",
        args.grid,
        if args.stitch { "-stitched" } else { "" }
    );
    let dir = prepare_run_dir(&out_root, &run_id)?;
    let config = serde_json::json!({
        "records": args.records.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "stitch": args.stitch,
        "grid": args.grid,
    });
    let mut manifest = RunManifest::begin(
        "front",
        &run_id,
        &bench_id,
        0,
        Some(bench_seed),
        None,
        config,
    );
    manifest.write(&dir)?;

    let started = Instant::now();
    let (sample_rows, fronts_json, stitch_json, crop_json) = if args.stitch {
        let stitched =
            stitch_fronts(&instance.handle, chains, args.grid).map_err(explorer_failure)?;
        let mut rows = Vec::new();
        for (fi, samples) in stitched.samples.iter().enumerate() {
            for s in samples {
                rows.push(SampleRow {
                    front: fi,
                    t: s.t,
                    kept: s.kept,
                    f: s.f.as_slice().to_vec(),
                });
            }
        }
        let fronts = stitched
            .fronts
            .iter()
            .zip(&run_ids)
            .map(|(front, rid)| chain_json(front, rid))
            .collect::<Result<Vec<_>, _>>()?;
        let stitch_points = stitched
            .stitch_points
            .iter()
            .map(|p| {
                serde_json::json!({"from_front": p.from_front, "to_front": p.to_front, "t": p.t})
            })
            .collect::<Vec<_>>();
        let crops = stitched
            .crop_log
            .iter()
            .map(|c| serde_json::json!({"front": c.front, "t_start": c.t_start, "t_end": c.t_end}))
            .collect::<Vec<_>>();
        (rows, fronts, stitch_points, crops)
    } else {
        let mut rows = Vec::new();
        let mut fronts = Vec::new();
        for (fi, (front, rid)) in chains.iter().zip(&run_ids).enumerate() {
            for t in grid_ts(front, args.grid) {
                let x = front.sample_t(t).map_err(explorer_failure)?;
                let f = instance
                    .handle
                    .evaluate(&x)
                    .map_err(|e| CliFailure::Runtime(e.to_string()))?;
                rows.push(SampleRow {
                    front: fi,
                    t,
                    kept: true,
                    f: f.as_slice().to_vec(),
                });
            }
            fronts.push(chain_json(front, rid)?);
        }
        (rows, fronts, vec![], vec![])
    };

    write_samples(&dir.join(SAMPLES_FILE), &run_id, &sample_rows)?;
    let front_json = serde_json::json!({
        "schema": "front-v1",
        "benchmark": bench_id,
        "grid": args.grid,
        "stitched": args.stitch,
        "fronts": fronts_json,
        "stitch_points": stitch_json,
        "crop_log": crop_json,
    });
    let front_path = dir.join("front.json");
    std::fs::write(
        &front_path,
        serde_json::to_string_pretty(&front_json)
            .map_err(|e| CliFailure::Runtime(format!("serializing front.json: {e}")))?,
    )
    .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", front_path.display())))?;

    let counters = BTreeMap::from([("front".to_string(), instance.handle.snapshot())]);
    manifest.finish(counters, started.elapsed().as_secs_f64(), false, vec![]);
    manifest.write(&dir)?;
    let kept = sample_rows.iter().filter(|s| s.kept).count();
    println!(
        "{run_id}: {} samples, {kept} kept, {} stitch points -> {}",
        sample_rows.len(),
        stitch_json.len(),
        dir.display()
    );
    Ok(())
}

fn mode_name(mode: &HvMode) -> &'static str {
    match mode {
        HvMode::Exact2d => "exact2d",
        HvMode::Exact3d => "exact3d",
        HvMode::MonteCarlo { .. } => "mc",
    }
}

pub fn cmd_hv(args: &HvArgs, out: Option<&Path>) -> Result<(), CliFailure> {
    if args.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let mut benchmark: Option<String> = None;
    let mut points: Vec<ObjectiveValues> = Vec::new();
    let mut m: Option<usize> = None;
    for path in &args.records {
        // the manifest is optional here: hand-written CSVs are measurable
        // as long as --ref pins the reference corner
        let manifest_path = sibling(path, MANIFEST_FILE);
        if manifest_path.exists() {
            let man = RunManifest::read(&manifest_path)?;
            match &benchmark {
                None => benchmark = Some(man.benchmark),
                Some(b) if *b != man.benchmark => {
                    return Err(usage(format!(
                        "mixed benchmarks across records files: `{b}` vs `{}`",
                        man.benchmark
                    )));
                }
                _ => {}
            }
        }
        for row in read_records(path)? {
            match m {
                None => m = Some(row.f.len()),
                Some(mm) if mm != row.f.len() => {
                    return Err(usage(
                        "records carry inconsistent objective counts across files",
                    ));
                }
                _ => {}
            }
            points.push(ObjectiveValues::new(row.f));
        }
    }

    let (reference, reference_source) = match &args.reference {
        Some(raw) => {
            let corner = parse_f64_list(raw, "ref")?;
            if let Some(mm) = m {
                if corner.len() != mm {
                    return Err(usage(format!(
                        "--ref has {} entries but the records carry {mm} objectives",
                        corner.len()
                    )));
                }
            }
            (ObjectiveValues::new(corner), "flag")
        }
        None => {
            let bench = benchmark.clone().ok_or_else(|| {
                usage("no manifest found next to the records; pass --ref explicitly")
            })?;
            let mm = m.ok_or_else(|| {
                usage("the records are empty; pass --ref to define the box")
            })?;
            let corner = default_reference(&bench, mm).ok_or_else(|| {
                usage(format!(
                    "benchmark `{bench}` has no default reference corner; pass --ref"
                ))
            })?;
            if corner.len() != mm {
                return Err(usage(format!(
                    "the default reference for `{bench}` has {} entries but the records \
                     carry {mm} objectives",
                    corner.len()
                )));
            }
            (corner, "benchmark-default")
        }
    };
    let m = m.unwrap_or_else(|| reference.len());
    let mode = match args.mode.as_str() {
        "auto" => match m {
            2 => HvMode::Exact2d,
            3 => HvMode::Exact3d,
            _ => HvMode::MonteCarlo { samples: args.samples, seed: args.seed },
        },
        "exact2d" => HvMode::Exact2d,
        "exact3d" => HvMode::Exact3d,
        "mc" => HvMode::MonteCarlo { samples: args.samples, seed: args.seed },
        other => {
            return Err(usage(format!(
                "unknown --mode `{other}` (auto, exact2d, exact3d, mc)"
            )));
        }
    };

    let out_root = resolve_out_dir(out);
    let bench_label = benchmark.clone().unwrap_or_else(|| "custom".to_string());
    let run_id = format!("hv-{bench_label}");
    let dir = prepare_run_dir(&out_root, &run_id)?;
    let config = serde_json::json!({
        "records": args.records.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "reference": reference.as_slice(),
        "reference_source": reference_source,
        "mode": mode_name(&mode),
        "samples": args.samples,
    });
    let mut manifest = RunManifest::begin(
        "hv",
        &run_id,
        &bench_label,
        args.seed,
        None,
        None,
        config,
    );
    manifest.write(&dir)?;

    let started = Instant::now();
    let (value, std_error) = match mode {
        HvMode::MonteCarlo { samples, seed } => {
            let est = hv_monte_carlo(&points, &reference, samples, seed)
                .map_err(|e| usage(e.to_string()))?;
            (est.value, Some(est.std_error))
        }
        exact => (
            hypervolume(&points, &HvConfig { reference: reference.clone(), mode: exact })
                .map_err(|e| usage(e.to_string()))?,
            None,
        ),
    };

    let hv_json = serde_json::json!({
        "schema": "hv-v1",
        "benchmark": benchmark,
        "mode": mode_name(&mode),
        "reference": reference.as_slice(),
        "value": value,
        "std_error": std_error,
        "points": points.len(),
    });
    let hv_path = dir.join("hv.json");
    std::fs::write(
        &hv_path,
        serde_json::to_string_pretty(&hv_json)
            .map_err(|e| CliFailure::Runtime(format!("serializing hv.json: {e}")))?,
    )
    .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", hv_path.display())))?;
    manifest.finish(BTreeMap::new(), started.elapsed().as_secs_f64(), false, vec![]);
    manifest.write(&dir)?;
    println!("{value}");
    Ok(())
}
