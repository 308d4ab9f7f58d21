//! Runs a TOML experiment file and writes CSV, JSON and SVG artifacts, the
//! same as `bmfactors run`.
//!
//! cargo run --release --example run_config -- crates/core/configs/quick.toml out/

use bmfactors::report::{self, Overrides, RunManifest};
use bmfactors::Executor;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/quick.toml").into());
    let out = args.next().unwrap_or_else(|| "results".into());
    let manifest = RunManifest::from_config_file(&config, out, Overrides::default())?;
    let summary = report::run(&manifest, &Executor::global())?;
    for e in &summary.experiments {
        println!("{:<20} {}", e.name, if e.passed { "pass" } else { "FAIL" });
    }
    for line in summary.failure_listing() {
        println!("  {line}");
    }
    std::process::exit(summary.exit_code());
}
