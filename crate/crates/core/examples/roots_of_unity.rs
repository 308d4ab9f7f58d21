//! Values of a complex Gaussian polynomial at the `(n+1)`-th roots of unity
//! are i.i.d.; their scaled maximum grows like `log(n+1)`.

use bmfactors::experiments::{run_roots_of_unity_diagnostics, ExperimentConfig, TheoremId};
use bmfactors::{DistributionSpec, Executor};

fn main() -> anyhow::Result<()> {
    let cfg = ExperimentConfig::new(TheoremId::AuxOrtho, DistributionSpec::complex_gaussian(), vec![16], 10_000, 9);
    let o = run_roots_of_unity_diagnostics(&cfg, &Executor::global())?;
    println!(
        "n = 16: max off-diagonal covariance {:.4}, mean diagonal {:.4}, grid sum {:.1e}",
        o.max_offdiag_cov, o.mean_diag_cov, o.grid_sum
    );
    for n in [64, 256, 1024, 4096] {
        let cfg = ExperimentConfig::new(TheoremId::AuxExtremes, DistributionSpec::complex_gaussian(), vec![n], 100, 9);
        let o = run_roots_of_unity_diagnostics(&cfg, &Executor::global())?;
        println!("n = {n:>4}: E[max_j X_nj]/log(n+1) = {:.4} +- {:.4}", o.extremes.point, o.extremes.stderr);
    }
    Ok(())
}
