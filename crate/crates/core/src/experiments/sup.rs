use super::{Check, ExperimentConfig, TheoremId, Verdict, INV_SQRT3, SQRT_TWO_THIRDS};
use crate::ensembles::sample_coefficients;
use crate::error::Result;
use crate::factor::reciprocal_pair_check;
use crate::norms::sup_norm;
use crate::poly::derivative;
use crate::stats::{EstimateResult, Executor};

/// Per-trial certified quantities on the unit circle.
#[derive(Debug, Clone, Copy)]
struct SupTrial {
    /// Certified bracket of the factor `‖P'‖∞/‖P‖∞`.
    factor: (f64, f64),
    norm: (f64, f64),
    deriv_norm: (f64, f64),
    /// Certified upper bound of `M(p) + M(q)` minus `n` (T4 only).
    pair_margin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SupDegreeSummary {
    pub n: usize,
    /// Mean of the factor bracket midpoints.
    pub factor: EstimateResult,
    pub mean_lower: f64,
    pub mean_upper: f64,
    /// Smallest certified `M(p) + M(q) - n` over trials (T4).
    pub min_pair_margin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SupNormBoundsOutcome {
    pub per_degree: Vec<SupDegreeSummary>,
    pub checks: Vec<Check>,
}

/// Sup-norm factors on the unit circle.
///
/// * `T4`: `E[M_n] ≥ n/2` for conjugation-invariant laws, and the certified
///   `M(p) + M(q) ≥ n` for every sample and its conjugate reciprocal `q`.
/// * `T5`: complex Gaussian coefficients, `E[M_n]/n` inside
///   `[1/2, √(2/3)]` (widened), plus quantiles of `‖P_n‖∞/√(n log n)` against
///   1 and of `‖P_n'‖∞/√(n³ log n)` against `√(2/3)`.
///
/// Every verdict uses the side of the enclosure that makes it sound.
pub fn run_sup_norm_bounds(cfg: &ExperimentConfig, exec: &Executor) -> Result<SupNormBoundsOutcome> {
    cfg.validate()?;
    let eps = cfg.norm.sup_eps;
    let t4 = cfg.theorem_id == TheoremId::T4;
    let mut checks = Vec::new();
    let mut per_degree = Vec::new();

    for &n in &cfg.degrees {
        let trials = exec.map_trials(cfg.trials, |stream| {
            let p = sample_coefficients(&cfg.dist, n, cfg.seed, stream);
            let e = sup_norm(&p, &cfg.norm)?;
            let d = sup_norm(&derivative(&p), &cfg.norm)?;
            let factor = if e.lower == 0.0 {
                (0.0, 0.0)
            } else {
                (d.lower / e.upper, d.upper / e.lower)
            };
            let pair_margin = if t4 && n >= 1 && !p.is_zero() {
                Some(reciprocal_pair_check(&p, eps)?.sum_upper - n as f64)
            } else {
                None
            };
            Ok(SupTrial {
                factor,
                norm: (e.lower, e.upper),
                deriv_norm: (d.lower, d.upper),
                pair_margin,
            })
        })?;

        let mids: Vec<f64> = trials.iter().map(|t| 0.5 * (t.factor.0 + t.factor.1)).collect();
        let factor = EstimateResult::from_samples(&mids, cfg.seed);
        let count = trials.len() as f64;
        let mean_lower = trials.iter().map(|t| t.factor.0).sum::<f64>() / count;
        let mean_upper = trials.iter().map(|t| t.factor.1).sum::<f64>() / count;
        let min_pair_margin = trials
            .iter()
            .filter_map(|t| t.pair_margin)
            .reduce(f64::min);
        let nf = n.max(1) as f64;

        if t4 {
            let k = cfg.tolerances.get("stderr_multiplier");
            let slack = mean_upper - factor.point;
            let bound = nf / 2.0 - k * factor.stderr - slack;
            checks.push(Check::new(
                Some(n),
                "mean sup-norm factor",
                factor,
                Verdict::from_bool(factor.point >= bound),
                format!("E[M_n] >= n/2 - {k} stderr - enclosure slack ({slack:.4}); threshold {bound:.4}"),
            ));
            if let Some(m) = min_pair_margin {
                checks.push(Check::new(
                    Some(n),
                    "min certified M(p)+M(q) - n",
                    EstimateResult::exact(m, cfg.trials, cfg.seed),
                    Verdict::from_bool(m >= 0.0),
                    "certified upper bound of M(p) + M(q) is at least n in every trial",
                ));
            }
        } else {
            let lo = cfg.tolerances.get("ratio_low");
            let hi = cfg.tolerances.get("ratio_high");
            let scaled = EstimateResult::from_samples(&mids.iter().map(|m| m / nf).collect::<Vec<_>>(), cfg.seed);
            let ok = mean_lower / nf >= lo && mean_upper / nf <= hi;
            checks.push(Check::new(
                Some(n),
                "mean M_n/n",
                scaled,
                Verdict::from_bool(ok),
                format!(
                    "certified means [{:.5}, {:.5}] inside [{lo}, {hi}] (bounds 1/2 and sqrt(2/3) = {SQRT_TWO_THIRDS:.5})",
                    mean_lower / nf,
                    mean_upper / nf
                ),
            ));
            checks.push(Check::new(
                Some(n),
                "mean M_n/n vs 1/sqrt(3)",
                scaled,
                Verdict::Info,
                format!("conjectured limit {INV_SQRT3:.5}; observational only"),
            ));

            let log_n = nf.ln().max(f64::MIN_POSITIVE);
            let q_sup = cfg.tolerances.get("sup_quantile");
            let sup_min = cfg.tolerances.get("sup_quantile_min");
            let growth: Vec<f64> = trials.iter().map(|t| t.norm.0 / (nf * log_n).sqrt()).collect();
            let gq = EstimateResult::quantile(&growth, q_sup, cfg.seed);
            checks.push(Check::new(
                Some(n),
                format!("q{:.0} ||P_n||/sqrt(n log n)", 100.0 * q_sup),
                gq,
                Verdict::from_bool(gq.point >= sup_min),
                format!("certified lower enclosure; liminf >= 1 a.s.; threshold {sup_min}"),
            ));
            let q_d = cfg.tolerances.get("deriv_quantile");
            let d_max = cfg.tolerances.get("deriv_quantile_max");
            let dgrowth: Vec<f64> = trials
                .iter()
                .map(|t| t.deriv_norm.1 / (nf * nf * nf * log_n).sqrt())
                .collect();
            let dq = EstimateResult::quantile(&dgrowth, q_d, cfg.seed);
            checks.push(Check::new(
                Some(n),
                format!("q{:.0} ||P_n'||/sqrt(n^3 log n)", 100.0 * q_d),
                dq,
                Verdict::from_bool(dq.point <= d_max),
                format!("certified upper enclosure; limsup <= sqrt(2/3) a.s.; threshold {d_max}"),
            ));
        }
        per_degree.push(SupDegreeSummary {
            n,
            factor,
            mean_lower,
            mean_upper,
            min_pair_margin,
        });
    }
    Ok(SupNormBoundsOutcome { per_degree, checks })
}
