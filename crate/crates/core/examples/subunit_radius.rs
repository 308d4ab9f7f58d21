//! On `|z| = r < 1` the factor converges along each trajectory: late
//! coefficients are damped by `r^k`.

use bmfactors::experiments::{run_subunit_radius, ExperimentConfig, TheoremId};
use bmfactors::{DistributionSpec, Executor, NormSpec};

fn main() -> anyhow::Result<()> {
    for (p, dist) in [
        (2.0, DistributionSpec::complex_gaussian()),
        (4.0, DistributionSpec::uniform_symmetric(3f64.sqrt())?),
    ] {
        let cfg = ExperimentConfig::new(TheoremId::T2, dist.clone(), vec![10, 40, 160], 100, 2)
            .with_norm(NormSpec::new(p, 0.8)?);
        let o = run_subunit_radius(&cfg, &Executor::global())?;
        println!("{dist}, p = {p}, r = 0.8");
        let t = &o.trajectories[0];
        for (n, m) in t.n_grid.iter().zip(&t.m_values) {
            println!("  stream 0: n = {n:>4}  M_n = {m:.8}");
        }
        for (n, e) in &o.estimates {
            println!("  E[M_{n}] = {:.5} +- {:.5}", e.point, e.stderr);
        }
        println!("  max stabilization gap {:.2e}", o.max_stabilization_gap);
    }
    Ok(())
}
