//! Config files, run manifests and the CSV / JSON / SVG artifacts of a run.
//!
//! A run writes, into its output directory:
//!
//! * `manifest.toml`: config path, resolved configs, crate version and
//!   timestamp; written before any experiment starts.
//! * `<name>.csv` per experiment with columns
//!   `n,statistic,point,stderr,ci_low,ci_high,verdict`.
//! * `summary.json`: every check and trajectory of every experiment.
//! * `<name>_traj<k>.svg` per trajectory diagnostic.
//!
//! CSV and JSON contents depend only on the resolved configs.

mod config;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{emit_config, parse_config, parse_config_str};
pub use svg::trajectory_svg;

use crate::error::{Error, Result};
use crate::experiments::{run_experiment, Check, ExperimentConfig, ExperimentOutcome, TrajectoryDiagnostic, Verdict};
use crate::stats::Executor;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: String,
    pub configs: Vec<ExperimentConfig>,
    pub output_dir: PathBuf,
    pub artifact_version: String,
    pub timestamp: String,
}

/// Command-line adjustments applied on top of a parsed config list.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Multiplies every trial count; results are rounded and kept ≥ 1.
    pub trials_scale: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, configs: &mut [ExperimentConfig]) -> Result<()> {
        if let Some(s) = self.trials_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidArgument(format!("trials scale must be positive, got {s}")));
            }
        }
        for c in configs {
            if let Some(seed) = self.seed {
                c.seed = seed;
            }
            if let Some(s) = self.trials_scale {
                c.trials = ((c.trials as f64 * s).round() as usize).max(1);
            }
        }
        Ok(())
    }
}

impl RunManifest {
    pub fn new(config_path: impl Into<String>, configs: Vec<ExperimentConfig>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            config_path: config_path.into(),
            configs,
            output_dir: output_dir.into(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// Parses `path` and applies `overrides`.
    pub fn from_config_file(path: impl AsRef<Path>, output_dir: impl Into<PathBuf>, overrides: Overrides) -> Result<Self> {
        let path = path.as_ref();
        let mut configs = parse_config(path)?;
        overrides.apply(&mut configs)?;
        Ok(Self::new(path.display().to_string(), configs, output_dir))
    }

    pub fn to_toml(&self) -> String {
        let header = format!(
            "[manifest]\nconfig_path = {}\noutput_dir = {}\nartifact_version = {}\ntimestamp = {}\n\n",
            toml::Value::String(self.config_path.clone()),
            toml::Value::String(self.output_dir.display().to_string()),
            toml::Value::String(self.artifact_version.clone()),
            toml::Value::String(self.timestamp.clone()),
        );
        header + &emit_config(&self.configs)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub theorem_id: String,
    pub passed: bool,
    /// Set when the experiment stopped with an error instead of verdicts.
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub trajectories: Vec<TrajectoryDiagnostic>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub artifact_version: String,
    pub passed: bool,
    pub experiments: Vec<ExperimentRecord>,
}

impl RunSummary {
    /// 0 iff every verdict passed.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// One line per failing check or errored experiment.
    pub fn failure_listing(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.experiments {
            if let Some(err) = &e.error {
                out.push(format!("{} ({}): error: {err}", e.name, e.theorem_id));
            }
            for c in e.checks.iter().filter(|c| c.verdict == Verdict::Fail) {
                let n = c.n.map(|n| format!(" n={n}")).unwrap_or_default();
                out.push(format!(
                    "{} ({}){n}: {} = {:.6} fails: {}",
                    e.name, e.theorem_id, c.statistic, c.estimate.point, c.detail
                ));
            }
        }
        out
    }
}

fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV rows for one experiment's checks.
pub fn checks_csv(checks: &[Check]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(["n", "statistic", "point", "stderr", "ci_low", "ci_high", "verdict"])
        .map_err(io)?;
    for c in checks {
        let e = &c.estimate;
        w.write_record([
            c.n.map(|n| n.to_string()).unwrap_or_default(),
            c.statistic.clone(),
            full(e.point),
            full(e.stderr),
            full(e.ci95.0),
            full(e.ci95.1),
            c.verdict.as_str().to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn record(name: String, cfg: &ExperimentConfig, outcome: Result<ExperimentOutcome>) -> ExperimentRecord {
    match outcome {
        Ok(o) => ExperimentRecord {
            name,
            theorem_id: cfg.theorem_id.as_str().into(),
            passed: o.passed(),
            error: None,
            checks: o.checks,
            trajectories: o.diagnostics,
        },
        Err(e) => ExperimentRecord {
            name,
            theorem_id: cfg.theorem_id.as_str().into(),
            passed: false,
            error: Some(e.to_string()),
            checks: Vec::new(),
            trajectories: Vec::new(),
        },
    }
}

/// Runs every experiment in the manifest and writes its artifacts.
///
/// The manifest is written first. An experiment that errors is recorded as
/// failed and the remaining ones still run.
pub fn run(manifest: &RunManifest, exec: &Executor) -> Result<RunSummary> {
    let dir = &manifest.output_dir;
    if manifest.configs.is_empty() {
        return Ok(RunSummary {
            artifact_version: manifest.artifact_version.clone(),
            passed: true,
            experiments: Vec::new(),
        });
    }
    fs::create_dir_all(dir)?;
    fs::write(dir.join("manifest.toml"), manifest.to_toml())?;

    let mut experiments = Vec::new();
    for (i, cfg) in manifest.configs.iter().enumerate() {
        let name = cfg.name(i);
        let rec = record(name.clone(), cfg, run_experiment(cfg, exec));
        fs::write(dir.join(format!("{name}.csv")), checks_csv(&rec.checks)?)?;
        for (k, d) in rec.trajectories.iter().enumerate() {
            let title = format!("{name}: {}", cfg.theorem_id);
            fs::write(
                dir.join(format!("{name}_traj{k:03}.svg")),
                trajectory_svg(&title, d, &manifest.timestamp),
            )?;
        }
        experiments.push(rec);
    }
    let summary = RunSummary {
        artifact_version: manifest.artifact_version.clone(),
        passed: experiments.iter().all(|e| e.passed),
        experiments,
    };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    Ok(summary)
}
