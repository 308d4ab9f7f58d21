use num_complex::Complex64;

use super::{Check, ExperimentConfig, TheoremId, Verdict};
use crate::ensembles::sample_coefficients;
use crate::error::Result;
use crate::poly::{evaluate_on_grid, CircleGrid};
use crate::stats::{EstimateResult, Executor};

/// `max_{j≠l} |Σ_{k=0}^{n} (z_j conj(z_l))^k|` over the `(n+1)`-th roots of
/// unity; zero in exact arithmetic.
///
/// `z_j conj(z_l) = z_d` with `d = (j - l) mod (n+1)`, and `z_d^k = z_{dk mod
/// (n+1)}`, so each term is read off the grid with exact index arithmetic and
/// only the `n` distinct values of `d` need summing.
pub fn roots_of_unity_grid_sum(n: usize) -> f64 {
    let m = n + 1;
    let grid = CircleGrid::unit(m).expect("n + 1 >= 1");
    let pts = grid.points();
    (1..m)
        .map(|d| {
            (0..m)
                .map(|k| pts[(d * k) % m])
                .sum::<Complex64>()
                .norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct RootsOfUnityOutcome {
    pub n: usize,
    /// Largest off-diagonal `|E[P(z_j) conj P(z_l)]| / (n+1)`.
    pub max_offdiag_cov: f64,
    /// Mean diagonal `E|P(z_j)|² / (n+1)`, expected 1.
    pub mean_diag_cov: f64,
    /// `E[max_j X_{n,j}] / log(n+1)` with `X_{n,j} = |P(z_j)|²/(n+1)`.
    pub extremes: EstimateResult,
    pub grid_sum: f64,
    pub checks: Vec<Check>,
}

/// Values of a complex Gaussian polynomial at the `(n+1)`-th roots of unity:
/// empirical covariance (uncorrelated, hence independent) and the scaled
/// maximum `max_j |P(z_j)|²/((n+1) log(n+1))`, whose limit is 1.
///
/// Uses the largest configured degree.
pub fn run_roots_of_unity_diagnostics(cfg: &ExperimentConfig, exec: &Executor) -> Result<RootsOfUnityOutcome> {
    cfg.validate()?;
    let n = cfg.max_degree();
    let m = n + 1;
    let grid = CircleGrid::unit(m)?;
    let ortho = cfg.theorem_id == TheoremId::AuxOrtho;
    let log_m = (m as f64).ln();

    let values = exec.map_trials(cfg.trials, |stream| {
        let p = sample_coefficients(&cfg.dist, n, cfg.seed, stream);
        Ok(evaluate_on_grid(&p, &grid))
    })?;

    // Second moments, accumulated in trial order.
    let mut cov = vec![Complex64::new(0.0, 0.0); m * m];
    for v in &values {
        for j in 0..m {
            for l in 0..m {
                cov[j * m + l] += v[j] * v[l].conj();
            }
        }
    }
    let norm = cfg.trials as f64 * m as f64;
    let mut max_off: f64 = 0.0;
    let mut diag = 0.0;
    for j in 0..m {
        for l in 0..m {
            let c = cov[j * m + l] / norm;
            if j == l {
                diag += c.re;
            } else {
                max_off = max_off.max(c.norm());
            }
        }
    }
    let mean_diag = diag / m as f64;

    let maxima: Vec<f64> = values
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max) / m as f64 / log_m)
        .collect();
    let extremes = EstimateResult::from_samples(&maxima, cfg.seed);
    let grid_sum = roots_of_unity_grid_sum(n);

    let judged = |applies: bool, ok: bool| if applies { Verdict::from_bool(ok) } else { Verdict::Info };
    let mut checks = Vec::new();
    if ortho {
        let gmax = cfg.tolerances.get("grid_sum_max");
        let cmax = cfg.tolerances.get("cov_max");
        checks.push(Check::new(
            Some(n),
            "max |sum_k (z_j conj z_l)^k|, j != l",
            EstimateResult::exact(grid_sum, 1, cfg.seed),
            judged(true, grid_sum <= gmax),
            format!("deterministic roots-of-unity sum <= {gmax:e}"),
        ));
        checks.push(Check::new(
            Some(n),
            "max off-diagonal normalized covariance",
            EstimateResult::exact(max_off, cfg.trials, cfg.seed),
            judged(true, max_off <= cmax),
            format!("|E[P(z_j) conj P(z_l)]|/(n+1) <= {cmax}"),
        ));
        checks.push(Check::new(
            Some(n),
            "mean diagonal normalized covariance",
            EstimateResult::exact(mean_diag, cfg.trials, cfg.seed),
            Verdict::Info,
            "E|P(z_j)|^2/(n+1), expected 1",
        ));
    }
    let (lo, hi) = if ortho {
        (0.0, f64::INFINITY)
    } else {
        (cfg.tolerances.get("ratio_low"), cfg.tolerances.get("ratio_high"))
    };
    checks.push(Check::new(
        Some(n),
        "mean max_j X_nj / log(n+1)",
        extremes,
        judged(!ortho, (lo..=hi).contains(&extremes.point)),
        format!("maximum of n+1 unit exponentials over log(n+1), limit 1; range [{lo}, {hi}]"),
    ));

    Ok(RootsOfUnityOutcome {
        n,
        max_offdiag_cov: max_off,
        mean_diag_cov: mean_diag,
        extremes,
        grid_sum,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sum_vanishes() {
        for n in [1, 2, 7, 16, 40, 1024, 4095] {
            assert!(roots_of_unity_grid_sum(n) <= 1e-12, "{n}");
        }
    }
}
