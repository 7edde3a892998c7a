//! Experiment driver: config parsing, sweeps, quantization checks and
//! CSV/SVG/manifest output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, Kind, RunConfig};
pub use experiment::Report;
pub use output::{Failure, RunManifest};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] gyrolim_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Plot(#[from] plot::PlotError),
    #[error("refusing to write into {0}: not empty and not a previous run")]
    Occupied(PathBuf),
}

/// `--out`, then `GYROLIM_OUT`, then the config, then `runs`. The first two
/// are merged by the argument parser.
pub fn output_root(cli_or_env: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli_or_env.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("runs"))
}

/// Empties a previous run directory; refuses foreign non-empty ones.
fn prepare_dir(dir: &Path) -> Result<(), RunError> {
    if dir.exists() {
        let empty = std::fs::read_dir(dir)?.next().is_none();
        if !empty {
            if !dir.join(output::MANIFEST).exists() {
                return Err(RunError::Occupied(dir.to_path_buf()));
            }
            std::fs::remove_dir_all(dir)?;
        }
    }
    std::fs::create_dir_all(dir)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub report: Report,
    pub manifest: RunManifest,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.report.failures.is_empty()
    }
}

/// Runs `cfg` (already resolved) into `<root>/<kind>` and writes plots,
/// the failure list and the manifest.
pub fn execute(cfg: &RunConfig, root: &Path) -> Result<RunSummary, RunError> {
    let kind = cfg.kind.expect("config resolved against a kind");
    let dir = root.join(kind.name());
    prepare_dir(&dir)?;
    let started = output::unix_seconds();
    let report = match kind {
        Kind::Euler => experiment::run_euler(cfg, &dir)?,
        Kind::Nbody => experiment::run_nbody(cfg, &dir)?,
        Kind::Sweep => experiment::run_sweep(cfg, &dir)?.0,
        Kind::QuantizeCheck => experiment::run_quantize(cfg, &dir)?,
        Kind::Coercivity => experiment::run_coercivity(cfg, &dir)?,
    };
    plot::emit_plots(&dir)?;
    let failures_json = serde_json::to_string_pretty(&report.failures).map_err(std::io::Error::other)?;
    output::write_atomic(&dir.join(output::FAILURES), failures_json.as_bytes())?;
    let manifest = RunManifest {
        kind: kind.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.snapshot(),
        started_unix: started,
        finished_unix: output::unix_seconds(),
        status: if report.failures.is_empty() { "passed" } else { "failed" }.into(),
        failures: report.failures.clone(),
        files: output::digest_tree(&dir)?,
    };
    manifest.write(&dir)?;
    Ok(RunSummary { dir, report, manifest })
}
