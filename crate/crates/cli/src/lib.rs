//! Scenario runner for the exciplex fibre-cooling library.
//!
//! A run resolves a [`config::RunConfig`], computes the scenario in memory,
//! writes each output file atomically and finishes with `manifest.json`.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use config::RunConfig;
use error::{CliError, Result};
use output::{write_all, write_manifest, RunManifest, SCHEMA_VERSION};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Runs `cfg` and writes its outputs under `out_dir`.
pub fn run_scenario(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<RunManifest> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let result = scenarios::run(cfg)?;
    let outputs = write_all(out_dir, &result.files)?;
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.clone(),
        library_version: exciplex::VERSION.to_string(),
        cli_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        threads,
        started_unix_s: started,
        wall_clock_s: clock.elapsed().as_secs_f64(),
        config: cfg.clone(),
        derived: result.derived,
        notes: result.notes,
        outputs,
    };
    write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

/// Runs inside a dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<RunManifest> {
    if threads == 0 {
        return Err(CliError::Config("--threads: must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| run_scenario(cfg, out_dir, threads))
}

/// Reads `target` as a config file when it exists, otherwise treats it as
/// a scenario name with default parameters.
pub fn load_config(target: &str, overrides: &[String]) -> Result<RunConfig> {
    let path = Path::new(target);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{target}: {e}")))?;
        RunConfig::parse(&text, overrides).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{target}: {m}")),
            other => other,
        })
    } else if target.ends_with(".toml") {
        Err(CliError::Io(format!("{target}: no such file")))
    } else {
        RunConfig::parse(&format!("scenario = \"{}\"", target.replace('"', "")), overrides)
    }
}
