//! Config-driven scenario runner.
//!
//! A run parses a JSON [`ScenarioConfig`], resolves it into SI units
//! ([`Scenario`]), computes everything in memory and then writes CSV, JSON
//! and optional SVG files plus a `manifest.json` into the output directory.
//! Sweep points run on a rayon pool; results are collected in sweep order so
//! the files do not depend on the number of workers.

mod config;
mod runs;
pub mod svg;

pub use config::*;
pub use runs::*;

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use crate::error::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Overrides `output_dir` from the config.
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleVersions {
    pub gridkit: &'static str,
    pub fiber: &'static str,
    pub propagate: &'static str,
    pub biphoton: &'static str,
    pub interference: &'static str,
    pub expcli: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub modules: ModuleVersions,
    pub config: ScenarioConfig,
    pub derived: Derived,
    pub outputs: Vec<String>,
}

/// Everything a run produced, before it is written to disk.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: ScenarioKind,
    /// The scenario's summary as JSON.
    pub summary: serde_json::Value,
    /// All files including `manifest.json`, in write order.
    pub artifacts: Vec<Artifact>,
}

fn finish<R: Serialize>(sc: &Scenario, outcome: Outcome<R>) -> Result<RunResult> {
    let mut artifacts = outcome.artifacts;
    let manifest = Manifest {
        tool: "photon-reshape",
        version: VERSION,
        scenario: sc.kind.name(),
        config_sha256: sc.config_sha256.clone(),
        seed: sc.seed,
        modules: ModuleVersions {
            gridkit: VERSION,
            fiber: VERSION,
            propagate: VERSION,
            biphoton: VERSION,
            interference: VERSION,
            expcli: VERSION,
        },
        config: sc.config.clone(),
        derived: outcome.derived,
        outputs: artifacts.iter().map(|a| a.name.clone()).collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    artifacts.push(Artifact {
        name: "manifest.json".into(),
        bytes,
    });
    Ok(RunResult {
        scenario: sc.kind,
        summary: serde_json::to_value(&outcome.report)?,
        artifacts,
    })
}

/// Runs the configured scenario in memory.
pub fn execute(sc: &Scenario, opts: &RunOptions) -> Result<RunResult> {
    let body = || match sc.kind {
        ScenarioKind::Fig2JsiSweep => finish(sc, run_fig2(sc, opts.svg)?),
        ScenarioKind::Fig3HeraldedMap => finish(sc, run_fig3(sc, opts.svg)?),
        ScenarioKind::Fig4Hom => finish(sc, run_fig4_hom(sc, opts.svg)?),
        ScenarioKind::Fig4Bump => finish(sc, run_fig4_bump(sc, opts.svg)?),
        ScenarioKind::Calibrate => finish(sc, run_calibrate(sc)?),
    };
    match opts.jobs {
        Some(n) => {
            if n == 0 {
                return Err(Error::config(None, "--jobs must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?
                .install(body)
        }
        None => body(),
    }
}

/// Writes every artifact into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
    }
    Ok(())
}

/// Runs a scenario and writes its outputs; returns the output directory.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<(PathBuf, RunResult)> {
    let dir = opts.out_dir.clone().unwrap_or_else(|| sc.output_dir.clone());
    info!("running {} into {}", sc.kind.name(), dir.display());
    let result = execute(sc, opts)?;
    write_artifacts(&dir, &result.artifacts)?;
    Ok((dir, result))
}
