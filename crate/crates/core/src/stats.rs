//! Monte-Carlo summaries and deterministic parallel trial execution.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{sample_coefficients, DistributionSpec};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub point: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub trials: usize,
    pub seed: u64,
}

impl EstimateResult {
    /// Sample mean with a normal-approximation interval. The sum is taken in
    /// slice order, so equal inputs give bit-identical output.
    pub fn from_samples(xs: &[f64], seed: u64) -> Self {
        let n = xs.len();
        assert!(n > 0, "no samples");
        let mean = xs.iter().sum::<f64>() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Self {
            point: mean,
            stderr,
            ci95: (mean - Z95 * stderr, mean + Z95 * stderr),
            trials: n,
            seed,
        }
    }

    /// A value with no sampling error (closed forms, worst-case residuals).
    pub fn exact(value: f64, trials: usize, seed: u64) -> Self {
        Self {
            point: value,
            stderr: 0.0,
            ci95: (value, value),
            trials,
            seed,
        }
    }

    /// Empirical frequency of `hits` out of `trials` with a Wald interval.
    pub fn proportion(hits: usize, trials: usize, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        let stderr = (p * (1.0 - p) / trials as f64).sqrt();
        Self {
            point: p,
            stderr,
            ci95: ((p - Z95 * stderr).max(0.0), (p + Z95 * stderr).min(1.0)),
            trials,
            seed,
        }
    }

    /// Empirical `q`-quantile with a distribution-free order-statistic
    /// interval; `stderr` is the interval half-width over [`Z95`].
    pub fn quantile(xs: &[f64], q: f64, seed: u64) -> Self {
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        assert!(n > 0, "no samples");
        let point = quantile_sorted(&sorted, q);
        let half = Z95 * (n as f64 * q * (1.0 - q)).sqrt();
        let lo_rank = ((n as f64 * q - half).floor().max(0.0) as usize).min(n - 1);
        let hi_rank = ((n as f64 * q + half).ceil() as usize).min(n - 1);
        let ci95 = (sorted[lo_rank].min(point), sorted[hi_rank].max(point));
        Self {
            point,
            stderr: (ci95.1 - ci95.0) / (2.0 * Z95),
            ci95,
            trials: n,
            seed,
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, 0.5)
}

/// Runs independent trials, in parallel, returning results in trial order.
///
/// Results never depend on the worker count: each trial is a pure function of
/// its index and all reductions happen afterwards over the ordered buffer.
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// Uses rayon's global pool.
    pub fn global() -> Self {
        Self { pool: None }
    }

    pub fn with_workers(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    pub fn map_trials<T, F>(&self, trials: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        let run = || -> Vec<Result<T>> { (0..trials as u64).into_par_iter().map(&f).collect() };
        let results = match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        // First failure in trial order, so errors are deterministic too.
        results.into_iter().collect()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::global()
    }
}

/// What to sample for a Monte-Carlo estimate: `trials` polynomials of one
/// degree, trial `i` drawn from stream `i`.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub dist: DistributionSpec,
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Sample mean of `statistic` over the plan's polynomials.
pub fn monte_carlo_expectation<F>(plan: &TrialPlan, exec: &Executor, statistic: F) -> Result<EstimateResult>
where
    F: Fn(&Polynomial) -> std::result::Result<f64, String> + Sync + Send,
{
    if plan.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let values = exec.map_trials(plan.trials, |stream_id| {
        let p = sample_coefficients(&plan.dist, plan.degree, plan.seed, stream_id);
        statistic(&p).map_err(|message| Error::Statistic {
            seed: plan.seed,
            stream_id,
            message,
        })
    })?;
    Ok(EstimateResult::from_samples(&values, plan.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(trials: usize, seed: u64) -> TrialPlan {
        TrialPlan {
            dist: DistributionSpec::complex_gaussian(),
            degree: 0,
            trials,
            seed,
        }
    }

    #[test]
    fn constant_statistic() {
        let e = monte_carlo_expectation(&plan(50, 1), &Executor::global(), |_| Ok(1.0)).unwrap();
        assert_eq!(e.point, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.ci95, (1.0, 1.0));
        assert_eq!(e.trials, 50);
    }

    #[test]
    fn exponential_mean_oracle() {
        let e = monte_carlo_expectation(&plan(10_000, 4), &Executor::global(), |p| {
            Ok(p.coeffs()[0].norm_sqr())
        })
        .unwrap();
        assert!((e.point - 1.0).abs() <= 3.0 * e.stderr, "{e:?}");
        // Exp(1) has unit variance.
        assert!((e.stderr - 0.01).abs() < 0.001);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let stat = |p: &Polynomial| Ok(p.coeffs()[0].re.sin() + p.coeffs()[0].im);
        let a = monte_carlo_expectation(&plan(999, 9), &Executor::with_workers(1).unwrap(), stat).unwrap();
        let b = monte_carlo_expectation(&plan(999, 9), &Executor::with_workers(7).unwrap(), stat).unwrap();
        assert_eq!(a.point.to_bits(), b.point.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn statistic_failures_name_the_trial() {
        let err = monte_carlo_expectation(&plan(20, 3), &Executor::with_workers(4).unwrap(), |p| {
            if p.coeffs()[0].re > 0.0 {
                Err("positive".into())
            } else {
                Ok(0.0)
            }
        })
        .unwrap_err();
        match err {
            Error::Statistic { seed, stream_id, .. } => {
                assert_eq!(seed, 3);
                // Deterministic: always the first failing stream.
                let first = (0..20)
                    .find(|&s| sample_coefficients(&DistributionSpec::complex_gaussian(), 0, 3, s).coeffs()[0].re > 0.0)
                    .unwrap();
                assert_eq!(stream_id, first);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(monte_carlo_expectation(&plan(0, 3), &Executor::global(), |_| Ok(0.0)).is_err());
    }

    #[test]
    fn quantile_interval_brackets_point() {
        let xs: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let q = EstimateResult::quantile(&xs, 0.9, 0);
        assert_eq!(q.point, 90.0);
        assert!(q.ci95.0 <= 90.0 && 90.0 <= q.ci95.1);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let p = EstimateResult::proportion(0, 10, 0);
        assert_eq!((p.point, p.stderr), (0.0, 0.0));
    }
}
