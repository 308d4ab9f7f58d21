//! Sup-norm factors of `p` and its conjugate reciprocal `q(z) = zⁿ conj(p(1/conj z))`
//! always sum to at least `n`; a self-reciprocal polynomial has factor `n/2`.

use bmfactors::{reciprocal_pair_check, sample_coefficients, self_reciprocal_factor_check, DistributionSpec, Polynomial};

fn main() -> anyhow::Result<()> {
    let eps = 0.001;
    for n in [5, 20, 100] {
        let p = sample_coefficients(&DistributionSpec::rademacher(), n, 8, 0);
        let c = reciprocal_pair_check(&p, eps)?;
        println!(
            "n = {n:>3}: M(p) = {:>8.3}  M(q) = {:>8.3}  certified sum in [{:.3}, {:.3}]  holds: {}",
            c.m_p.value,
            c.m_q.value,
            c.sum_lower,
            c.sum_upper,
            c.holds()
        );
    }
    // 1 + z + ... + z^n is its own conjugate reciprocal.
    let n = 12;
    let s = self_reciprocal_factor_check(&Polynomial::from_real(&vec![1.0; n + 1]), eps)?;
    println!(
        "self-reciprocal, n = {n}: factor in [{:.4}, {:.4}], n/2 = {} inside: {}",
        s.factor.lower(), s.factor.upper(), s.target, s.contains_target
    );
    Ok(())
}
