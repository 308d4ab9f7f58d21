//! `L²` factor on the unit circle along one growing polynomial:
//! `M_n/n` settles near `1/√3` as coefficients are appended.
//!
//! cargo run --release --example l2_trajectory -- [n_max] [seed]

use bmfactors::experiments::{geometric_grid, INV_SQRT3};
use bmfactors::{l2_factor_trajectory, sample_trajectory, DistributionSpec};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_max: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100_000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let traj = sample_trajectory(&DistributionSpec::complex_gaussian(), n_max, seed, 0);
    let grid = geometric_grid(n_max, &[]);
    let f = l2_factor_trajectory(&traj, 1.0, &grid)?;
    println!("{:>8}  {:>10}  {:>10}", "n", "M_n/n", "diff");
    for s in &f.samples {
        let m = s.value / s.n as f64;
        println!("{:>8}  {m:>10.6}  {:>+10.6}", s.n, m - INV_SQRT3);
    }
    println!("limit 1/sqrt(3) = {INV_SQRT3:.6}");
    Ok(())
}
