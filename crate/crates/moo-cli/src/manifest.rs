//! Run directories and manifests.
//!
//! Every command materializes one directory per run under the resolved
//! output root and writes `manifest.json` there *before* any data file, so
//! an interrupted run always leaves a valid manifest whose `partial` flag is
//! still raised. The manifest records everything needed to re-run the
//! command bit-identically in single-worker mode: the command, the full
//! configuration snapshot, the invocation seed, and the seeds derived from
//! it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use moo_core::CostSnapshot;
use serde::{Deserialize, Serialize};

use crate::CliFailure;

pub const MANIFEST_VERSION: &str = "v1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Build identifier stamped into every manifest.
pub fn artifact_version() -> String {
    format!("moo-{}", env!("CARGO_PKG_VERSION"))
}

/// `MOO_OUT_DIR` env var > `--out` flag > `./moo-runs`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    match std::env::var("MOO_OUT_DIR") {
        Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => flag
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("moo-runs")),
    }
}

/// Provenance and reproduction data for one run directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: String,
    pub command: String,
    pub run_id: String,
    pub benchmark: String,
    /// Invocation --seed; all derived seeds flow from it.
    pub seed: u64,
    /// Seed that instantiated the benchmark (start point, MLP data/init).
    pub bench_seed: Option<u64>,
    /// Seed of the exploration direction sampler, when one ran.
    pub rng_seed: Option<u64>,
    pub artifact_version: String,
    pub config: serde_json::Value,
    /// Oracle call counts per stage.
    pub counters: BTreeMap<String, CostSnapshot>,
    pub wall_time_seconds: f64,
    pub partial: bool,
    pub warnings: Vec<String>,
}

impl RunManifest {
    /// A fresh manifest with the partial flag raised; write it, run, then
    /// [`RunManifest::finish`] and write again.
    pub fn begin(
        command: &str,
        run_id: &str,
        benchmark: &str,
        seed: u64,
        bench_seed: Option<u64>,
        rng_seed: Option<u64>,
        config: serde_json::Value,
    ) -> Self {
        RunManifest {
            manifest_version: MANIFEST_VERSION.to_string(),
            command: command.to_string(),
            run_id: run_id.to_string(),
            benchmark: benchmark.to_string(),
            seed,
            bench_seed,
            rng_seed,
            artifact_version: artifact_version(),
            config,
            counters: BTreeMap::new(),
            wall_time_seconds: 0.0,
            partial: true,
            warnings: Vec::new(),
        }
    }

    pub fn finish(
        &mut self,
        counters: BTreeMap<String, CostSnapshot>,
        wall_time_seconds: f64,
        partial: bool,
        warnings: Vec<String>,
    ) {
        self.counters = counters;
        self.wall_time_seconds = wall_time_seconds;
        self.partial = partial;
        self.warnings = warnings;
    }

    pub fn write(&self, run_dir: &Path) -> Result<(), CliFailure> {
        let path = run_dir.join(MANIFEST_FILE);
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliFailure::Runtime(format!("serializing manifest: {e}")))?;
        std::fs::write(&path, body)
            .map_err(|e| CliFailure::Runtime(format!("writing {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, CliFailure> {
        let body = std::fs::read_to_string(path).map_err(|e| {
            CliFailure::Usage(format!(
                "cannot read run manifest {}: {e} (records files must sit next to \
                 their manifest.json)",
                path.display()
            ))
        })?;
        serde_json::from_str(&body).map_err(|e| {
            CliFailure::Usage(format!("malformed manifest {}: {e}", path.display()))
        })
    }
}

/// Creates (or reuses) the directory for `run_id` under the output root.
pub fn prepare_run_dir(out_root: &Path, run_id: &str) -> Result<PathBuf, CliFailure> {
    let dir = out_root.join(run_id);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliFailure::Runtime(format!("creating {}: {e}", dir.display())))?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_falls_back_to_the_default() {
        // the env override is exercised end-to-end in the binary tests,
        // where the environment can be controlled per process
        if std::env::var("MOO_OUT_DIR").is_err() {
            assert_eq!(resolve_out_dir(None), PathBuf::from("moo-runs"));
            assert_eq!(
                resolve_out_dir(Some(Path::new("/tmp/x"))),
                PathBuf::from("/tmp/x")
            );
        }
    }

    #[test]
    fn manifest_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = RunManifest::begin(
            "explore",
            "explore-zdt2-seed7-k2-s0.1",
            "zdt2",
            7,
            Some(11),
            Some(13),
            serde_json::json!({"k": 2}),
        );
        assert!(manifest.partial, "a fresh manifest is partial until finished");
        manifest.write(dir.path()).unwrap();
        manifest.finish(
            BTreeMap::from([("expand".to_string(), CostSnapshot::new(0, 5, 30))]),
            0.25,
            false,
            vec![],
        );
        manifest.write(dir.path()).unwrap();
        let back = RunManifest::read(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(back.run_id, manifest.run_id);
        assert_eq!(back.counters["expand"], CostSnapshot::new(0, 5, 30));
        assert!(!back.partial);
        assert_eq!(back.manifest_version, MANIFEST_VERSION);
    }
}
