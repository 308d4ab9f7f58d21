use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use bmfactors::experiments::TheoremId;
use bmfactors::report::{self, Overrides, RunManifest};
use bmfactors::selftest::run_selftest;
use bmfactors::Executor;

#[derive(Parser)]
#[command(version, about = "Monte-Carlo experiments on Bernstein-Markov factors of random polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a TOML config file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "results")]
        output_dir: PathBuf,
        /// Replace the seed of every experiment.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Multiply every trial count (e.g. 0.1 for a quick pass).
        #[arg(long)]
        trials_scale: Option<f64>,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the theorem ids a config may use.
    ListTheorems,
    /// Run the built-in exact-identity checks.
    Selftest,
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            config,
            output_dir,
            seed_override,
            trials_scale,
            workers,
        } => {
            let overrides = Overrides {
                seed: seed_override,
                trials_scale,
            };
            let manifest = RunManifest::from_config_file(&config, output_dir, overrides)
                .with_context(|| format!("loading {}", config.display()))?;
            if manifest.configs.is_empty() {
                eprintln!("warning: {} contains no experiments; nothing to do", config.display());
                return Ok(ExitCode::SUCCESS);
            }
            let exec = match workers {
                Some(w) => Executor::with_workers(w)?,
                None => Executor::global(),
            };
            let summary = report::run(&manifest, &exec)?;
            for e in &summary.experiments {
                println!("{:<6} {:<14} {}", if e.passed { "pass" } else { "FAIL" }, e.theorem_id, e.name);
            }
            println!("results in {}", manifest.output_dir.display());
            let failures = summary.failure_listing();
            if !failures.is_empty() {
                eprintln!("failures:");
                for f in failures {
                    eprintln!("  {f}");
                }
            }
            Ok(ExitCode::from(summary.exit_code() as u8))
        }
        Command::ListTheorems => {
            for t in TheoremId::ALL {
                println!("{:<13} {}", t.as_str(), t.description());
                let tol: Vec<String> = t.default_tolerances().iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{:<13} defaults: {}", "", tol.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let results = run_selftest();
            let mut ok = true;
            for r in &results {
                ok &= r.passed;
                let detail = if r.detail.is_empty() { String::new() } else { format!(" ({})", r.detail) };
                println!("{} {}{detail}", if r.passed { "pass" } else { "FAIL" }, r.name);
            }
            println!("{}/{} passed", results.iter().filter(|r| r.passed).count(), results.len());
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
