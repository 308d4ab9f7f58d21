//! Sup-norm factor of complex Gaussian polynomials: `E[M_n]/n` between 1/2
//! and `√(2/3)`, with every number computed from certified enclosures.

use bmfactors::experiments::{run_sup_norm_bounds, ExperimentConfig, TheoremId};
use bmfactors::{DistributionSpec, Executor};

fn main() -> anyhow::Result<()> {
    let cfg = ExperimentConfig::new(TheoremId::T5, DistributionSpec::complex_gaussian(), vec![50, 200, 800], 60, 5);
    let o = run_sup_norm_bounds(&cfg, &Executor::global())?;
    for c in &o.checks {
        println!(
            "n = {:>4}  {:<34} {:>9.5}  {:<5} {}",
            c.n.unwrap_or(0),
            c.statistic,
            c.estimate.point,
            c.verdict.as_str(),
            c.detail
        );
    }
    Ok(())
}
