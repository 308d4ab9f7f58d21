//! `Lᵖ` norms of random real polynomials on the unit circle, against
//! `‖P_n‖_p/√n → Γ(1+p/2)^{1/p}`.

use bmfactors::experiments::{lp_norm_target, INV_SQRT3};
use bmfactors::{derivative, lp_norm, sample_coefficients, DistributionSpec, NormSpec};

fn main() -> anyhow::Result<()> {
    let n = 500;
    let trials = 40;
    let dist = DistributionSpec::rademacher();
    println!("Rademacher coefficients, n = {n}, {trials} trials");
    println!("{:>4}  {:>12}  {:>8}  {:>8}", "p", "||P||/sqrt n", "target", "M_n/n");
    for p in [1.0, 2.0, 3.0, 4.0, 6.0] {
        let spec = NormSpec::new(p, 1.0)?;
        let (mut norm, mut fac) = (0.0, 0.0);
        for stream in 0..trials {
            let poly = sample_coefficients(&dist, n, 42, stream);
            let a = lp_norm(&poly, &spec)?;
            let b = lp_norm(&derivative(&poly), &spec)?;
            norm += a.value / (n as f64).sqrt();
            fac += b.value / a.value / n as f64;
        }
        println!(
            "{p:>4}  {:>12.5}  {:>8.5}  {:>8.5}",
            norm / trials as f64,
            lp_norm_target(p),
            fac / trials as f64
        );
    }
    println!("M_n/n limit 1/sqrt(3) = {INV_SQRT3:.5}");
    Ok(())
}
