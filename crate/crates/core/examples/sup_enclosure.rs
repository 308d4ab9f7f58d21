//! Certified sup-norm enclosures: `[lower, upper]` with `upper/lower = 1/(1-ε)`,
//! compared with brute-force sampling on a much finer grid.

use bmfactors::poly::evaluate_on_grid_horner;
use bmfactors::{sample_coefficients, sup_norm, CircleGrid, DistributionSpec, NormSpec};

fn main() -> anyhow::Result<()> {
    let p = sample_coefficients(&DistributionSpec::complex_gaussian(), 40, 3, 0);
    let fine = CircleGrid::unit(1 << 18)?;
    let brute = evaluate_on_grid_horner(&p, &fine).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("degree 40, fine-grid maximum {brute:.10}");
    for eps in [0.1, 0.01, 0.001] {
        let e = sup_norm(&p, &NormSpec::sup(1.0)?.with_sup_eps(eps)?)?;
        // The coarse grid is a subset of the fine one, so `lower` can only
        // exceed the brute-force maximum by rounding.
        println!(
            "eps {eps:<6} [{:.10}, {:.10}]  lower - brute = {:+.1e}  upper - brute = {:+.1e}",
            e.lower,
            e.upper,
            e.lower - brute,
            e.upper - brute
        );
    }
    Ok(())
}
