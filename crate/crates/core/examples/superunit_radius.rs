//! On `|z| = R > 1` the factor grows like `n/R`; `R·M_n/n` concentrates at 1.

use bmfactors::experiments::{run_superunit_radius, ExperimentConfig, TheoremId};
use bmfactors::{DistributionSpec, Executor, NormSpec};

fn main() -> anyhow::Result<()> {
    let cfg = ExperimentConfig::new(TheoremId::T3, DistributionSpec::complex_gaussian(), vec![10, 40, 160, 640], 400, 3)
        .with_norm(NormSpec::l2(1.05)?);
    let o = run_superunit_radius(&cfg, &Executor::global())?;
    println!("R = 1.05, complex Gaussian, 400 trials");
    println!("{:>5}  {:>10}  {:>10}  {:>14}", "n", "mean", "median", "P(|x-1|>0.05)");
    for ((n, e), ((_, med), (_, f))) in o.estimates.iter().zip(o.medians.iter().zip(&o.exceedance)) {
        println!("{n:>5}  {:>10.5}  {med:>10.5}  {:>14.3}", e.point, f.point);
    }
    println!("max Abel identity residual {:.1e}", o.max_abel_residual);
    Ok(())
}
