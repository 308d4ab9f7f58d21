//! Scripted Monte-Carlo experiments, one per limit theorem or inequality.
//!
//! Limits are asymptotic, so every verdict is a finite-`n` proxy:
//!
//! * almost-sure convergence: a single nested trajectory stabilises;
//! * convergence in probability: exceedance frequencies fall with `n` and the
//!   median sits near the limit;
//! * bounds on expectations: sample means with standard errors, using the
//!   certified side of any sup-norm enclosure.
//!
//! Every run is a pure function of its [`ExperimentConfig`]; trial `i` always
//! draws from coefficient stream `i`.

mod radius;
mod roots;
mod sup;
mod unit_circle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ensembles::DistributionSpec;
use crate::error::{Error, Result};
use crate::norms::NormSpec;
use crate::stats::{EstimateResult, Executor};

pub use radius::{
    abel_identity_residual, run_subunit_radius, run_superunit_radius, scaled_factor_over_radii, SubunitRadiusOutcome,
    SuperunitRadiusOutcome,
};
pub use roots::{
    roots_of_unity_grid_sum, run_roots_of_unity_diagnostics, RootsOfUnityOutcome,
};
pub use sup::{run_sup_norm_bounds, SupNormBoundsOutcome};
pub use unit_circle::{lp_norm_target, run_lp_unit_circle, run_unit_circle_l2, LpUnitCircleOutcome, UnitCircleL2Outcome};

/// `1/√3`
pub const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
/// `√(2/3)`
pub const SQRT_TWO_THIRDS: f64 = 0.816_496_580_927_726;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TheoremId {
    /// `Lᵖ` factors on the unit circle, real coefficients (in probability).
    #[serde(rename = "BL")]
    Bl,
    /// `L²` factor on the unit circle divided by `n` tends to `1/√3` a.s.
    T1,
    /// Factors on `|z| = r < 1` stay bounded a.s.; bounded expectation.
    T2,
    /// `L²` on `r < 1`: monotone convergence to `X_{2,r}`.
    P1,
    /// `L²` on `|z| = R > 1`: `R·M_n/n → 1` in probability.
    T3,
    /// Sup norm: `E[M_n] ≥ n/2` for conjugation-invariant laws.
    T4,
    /// Sup norm, complex Gaussian: `1/2 ≤ E[M_n]/n ≤ √(2/3)` asymptotically.
    T5,
    /// Values at roots of unity are uncorrelated.
    #[serde(rename = "AUX_ORTHO")]
    AuxOrtho,
    /// Maximum over roots of unity behaves like `log n`.
    #[serde(rename = "AUX_EXTREMES")]
    AuxExtremes,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Bl,
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::P1,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::T5,
        TheoremId::AuxOrtho,
        TheoremId::AuxExtremes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Bl => "BL",
            TheoremId::T1 => "T1",
            TheoremId::T2 => "T2",
            TheoremId::P1 => "P1",
            TheoremId::T3 => "T3",
            TheoremId::T4 => "T4",
            TheoremId::T5 => "T5",
            TheoremId::AuxOrtho => "AUX_ORTHO",
            TheoremId::AuxExtremes => "AUX_EXTREMES",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TheoremId::Bl => "Lp norms, unit circle, real i.i.d. coefficients: M_n/n -> 1/sqrt(3) in probability; ||P_n||_p/sqrt(n) -> Gamma(1+p/2)^(1/p)",
            TheoremId::T1 => "L2 norm, unit circle: M_n/n -> 1/sqrt(3) almost surely",
            TheoremId::T2 => "Lp norm on |z| = r < 1: M_n converges a.s. to a finite limit; sup_n E[M_n] < infinity",
            TheoremId::P1 => "L2 norm on |z| = r < 1: M_n increases to X_2r a.s. and E[M_n] -> E[X_2r]",
            TheoremId::T3 => "L2 norm on |z| = R > 1: R M_n/n -> 1 in probability (Abel summation identity checked per sample)",
            TheoremId::T4 => "sup norm, unit circle, conjugation-invariant law: E[M_n] >= n/2",
            TheoremId::T5 => "sup norm, unit circle, complex Gaussian: 1/2 <= E[M_n]/n <= sqrt(2/3) asymptotically; ||P_n|| and ||P_n'|| growth",
            TheoremId::AuxOrtho => "complex Gaussian values at the (n+1)-th roots of unity are uncorrelated",
            TheoremId::AuxExtremes => "max_j |P_n(z_j)|^2/(n+1) over roots of unity grows like log(n+1)",
        }
    }

    /// Default per-check parameters; a config may override any of these and
    /// nothing else.
    pub fn default_tolerances(self) -> &'static [(&'static str, f64)] {
        match self {
            TheoremId::Bl => &[("factor_abs", 0.03), ("norm_abs", 0.05), ("deriv_norm_abs", 0.05)],
            TheoremId::T1 => &[("limit_abs", 0.01)],
            TheoremId::T2 | TheoremId::P1 => &[
                ("stabilization", 0.01),
                ("flatness_sigmas", 2.0),
                ("monotone_slack", 1e-12),
            ],
            TheoremId::T3 => &[
                ("median_abs", 0.02),
                ("delta", 0.05),
                ("max_inversions", 1.0),
                ("abel_residual", 1e-10),
            ],
            TheoremId::T4 => &[("stderr_multiplier", 2.0)],
            TheoremId::T5 => &[
                ("ratio_low", 0.48),
                ("ratio_high", 0.8365),
                ("deriv_quantile", 0.9),
                ("deriv_quantile_max", 0.8665),
                ("sup_quantile", 0.5),
                ("sup_quantile_min", 1.0),
            ],
            TheoremId::AuxOrtho => &[("cov_max", 0.05), ("grid_sum_max", 1e-12)],
            TheoremId::AuxExtremes => &[("ratio_low", 0.85), ("ratio_high", 1.25)],
        }
    }

    /// Norm used when a config gives none.
    pub fn default_norm(self) -> NormSpec {
        let (p, r) = match self {
            TheoremId::Bl | TheoremId::T1 => (2.0, 1.0),
            TheoremId::T2 | TheoremId::P1 => (2.0, 0.5),
            TheoremId::T3 => (2.0, 2.0),
            TheoremId::T4 | TheoremId::T5 | TheoremId::AuxOrtho | TheoremId::AuxExtremes => (f64::INFINITY, 1.0),
        };
        NormSpec::new(p, r).expect("default norms are valid")
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown theorem_id {s:?} (expected one of {})",
                    TheoremId::ALL.map(|t| t.as_str()).join(", ")
                ))
            })
    }
}

/// Named real parameters for one experiment's checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn defaults(theorem: TheoremId) -> Self {
        Self(
            theorem
                .default_tolerances()
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        )
    }

    /// Applies overrides, rejecting keys the theorem does not use.
    pub fn with_overrides(theorem: TheoremId, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut t = Self::defaults(theorem);
        for (k, v) in overrides {
            match t.0.get_mut(k) {
                Some(slot) => *slot = *v,
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown tolerance {k:?} for {theorem} (known: {})",
                        t.0.keys().cloned().collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> f64 {
        *self
            .0
            .get(key)
            .unwrap_or_else(|| panic!("tolerance {key:?} missing; defaults not applied"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub theorem_id: TheoremId,
    /// Optional label used for output file names.
    pub label: Option<String>,
    pub dist: DistributionSpec,
    pub norm: NormSpec,
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// Config with the theorem's default norm and tolerances.
    pub fn new(theorem_id: TheoremId, dist: DistributionSpec, degrees: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            theorem_id,
            label: None,
            dist,
            norm: theorem_id.default_norm(),
            degrees,
            trials,
            seed,
            tolerances: Tolerances::defaults(theorem_id),
        }
    }

    pub fn with_norm(mut self, norm: NormSpec) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_tolerance(mut self, key: &str, value: f64) -> Result<Self> {
        let mut o = BTreeMap::new();
        o.insert(key.to_string(), value);
        let mut merged: BTreeMap<String, f64> = self.tolerances.0.clone();
        merged.extend(o);
        self.tolerances = Tolerances::with_overrides(self.theorem_id, &merged)?;
        Ok(self)
    }

    pub fn max_degree(&self) -> usize {
        *self.degrees.last().expect("validated configs have degrees")
    }

    /// Structural checks plus the theorem's hypotheses on law and norm.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.degrees.is_empty() {
            return Err(Error::InvalidArgument("degrees must not be empty".into()));
        }
        if self.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("degrees must be strictly increasing".into()));
        }
        self.norm.validated()?;
        check_hypotheses(self)
    }

    pub fn name(&self, index: usize) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("{index:02}_{}", self.theorem_id.as_str().to_ascii_lowercase()),
        }
    }
}

fn check_hypotheses(cfg: &ExperimentConfig) -> Result<()> {
    let t = cfg.theorem_id.as_str();
    let caps = cfg.dist.capabilities();
    let norm = &cfg.norm;
    let fail = |reason: String| Err(Error::hypothesis(t, reason));
    let need_complex_gaussian = || {
        if cfg.dist != DistributionSpec::complex_gaussian() {
            return fail(format!("requires complex_gaussian coefficients, got {}", cfg.dist));
        }
        Ok(())
    };
    match cfg.theorem_id {
        TheoremId::Bl => {
            if !caps.real_valued {
                return fail(format!("requires real-valued coefficients, got {}", cfg.dist));
            }
            if caps.mean.norm() > 1e-12 || (caps.second_moment - 1.0).abs() > 1e-9 {
                return fail(format!(
                    "requires mean 0 and variance 1, got mean {} and E|A|^2 = {}",
                    caps.mean, caps.second_moment
                ));
            }
            if norm.is_sup() || norm.radius != 1.0 {
                return fail("requires a finite p on the unit circle".into());
            }
            if norm.p > 2.0 && !caps.all_moments_finite {
                return fail(format!("p = {} > 2 requires E|A|^(2p) < infinity", norm.p));
            }
        }
        TheoremId::T1 => {
            if norm.p != 2.0 || norm.radius != 1.0 {
                return fail("requires the L2 norm on the unit circle".into());
            }
            if !caps.all_moments_finite {
                return fail("requires E|A|^2 < infinity".into());
            }
        }
        TheoremId::T2 | TheoremId::P1 => {
            if !(norm.radius < 1.0) {
                return fail(format!("requires radius < 1, got {}", norm.radius));
            }
            if cfg.theorem_id == TheoremId::P1 && norm.p != 2.0 {
                return fail("requires the L2 norm".into());
            }
            // The bounded-expectation half needs a bounded density of |A| near 0;
            // for p = 2 the stronger L2 result needs only E|A|^2 < infinity.
            if norm.p != 2.0 && !caps.abs_density_near_zero {
                return fail(format!(
                    "bounded expectation needs |A| to have a bounded density near 0; {} has none",
                    cfg.dist
                ));
            }
        }
        TheoremId::T3 => {
            if norm.p != 2.0 || !(norm.radius > 1.0) {
                return fail("requires the L2 norm on a radius R > 1".into());
            }
            if !caps.sq_density_near_zero {
                return fail(format!(
                    "requires |A|^2 to have a bounded density near 0; {} does not",
                    cfg.dist
                ));
            }
        }
        TheoremId::T4 => {
            if !norm.is_sup() || norm.radius != 1.0 {
                return fail("requires the sup norm on the unit circle".into());
            }
            if !caps.conjugation_invariant {
                return fail(format!("requires a law invariant under complex conjugation; {} is not", cfg.dist));
            }
        }
        TheoremId::T5 => {
            if !norm.is_sup() || norm.radius != 1.0 {
                return fail("requires the sup norm on the unit circle".into());
            }
            need_complex_gaussian()?;
        }
        TheoremId::AuxOrtho | TheoremId::AuxExtremes => need_complex_gaussian()?,
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for context, not judged.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

/// One row of an experiment's result table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub n: Option<usize>,
    pub statistic: String,
    pub estimate: EstimateResult,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    pub fn new(n: Option<usize>, statistic: impl Into<String>, estimate: EstimateResult, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            n,
            statistic: statistic.into(),
            estimate,
            verdict,
            detail: detail.into(),
        }
    }
}

/// One trajectory's statistic over a degree grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDiagnostic {
    pub label: String,
    pub n_grid: Vec<usize>,
    pub m_values: Vec<f64>,
    /// Value at the largest `n`.
    pub limit_estimate: f64,
    /// `max |m(n_i) - m(n_last)|` over the top half of the grid.
    pub stabilization_gap: f64,
    /// Horizontal reference line for plots.
    pub reference: Option<f64>,
}

impl TrajectoryDiagnostic {
    pub fn new(label: impl Into<String>, n_grid: Vec<usize>, m_values: Vec<f64>, reference: Option<f64>) -> Self {
        assert_eq!(n_grid.len(), m_values.len());
        assert!(!m_values.is_empty());
        let last = *m_values.last().unwrap();
        let half = m_values.len() / 2;
        let stabilization_gap = m_values[half..]
            .iter()
            .map(|m| (m - last).abs())
            .fold(0.0, f64::max);
        Self {
            label: label.into(),
            n_grid,
            m_values,
            limit_estimate: last,
            stabilization_gap,
            reference,
        }
    }
}

/// Everything an experiment reports, in a shape the report writers share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub theorem_id: TheoremId,
    pub checks: Vec<Check>,
    pub diagnostics: Vec<TrajectoryDiagnostic>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// Geometric grid `2, 4, 8, …` below `n_max`, plus `n_max` and any extra
/// degrees, sorted and deduplicated.
pub fn geometric_grid(n_max: usize, extra: &[usize]) -> Vec<usize> {
    let mut grid: Vec<usize> = std::iter::successors(Some(2usize), |&n| n.checked_mul(2))
        .take_while(|&n| n < n_max)
        .collect();
    grid.push(n_max);
    grid.extend(extra.iter().copied().filter(|&n| n <= n_max));
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Validates `cfg` and runs the experiment for its theorem.
pub fn run_experiment(cfg: &ExperimentConfig, exec: &Executor) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let (checks, diagnostics) = match cfg.theorem_id {
        TheoremId::T1 => {
            let o = run_unit_circle_l2(cfg, exec)?;
            (o.checks, vec![o.trajectory])
        }
        TheoremId::Bl => (run_lp_unit_circle(cfg, exec)?.checks, Vec::new()),
        TheoremId::T2 | TheoremId::P1 => {
            let o = run_subunit_radius(cfg, exec)?;
            (o.checks, o.trajectories)
        }
        TheoremId::T3 => (run_superunit_radius(cfg, exec)?.checks, Vec::new()),
        TheoremId::T4 | TheoremId::T5 => (run_sup_norm_bounds(cfg, exec)?.checks, Vec::new()),
        TheoremId::AuxOrtho | TheoremId::AuxExtremes => {
            (run_roots_of_unity_diagnostics(cfg, exec)?.checks, Vec::new())
        }
    };
    Ok(ExperimentOutcome {
        theorem_id: cfg.theorem_id,
        checks,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        assert_eq!(geometric_grid(20, &[]), vec![2, 4, 8, 16, 20]);
        assert_eq!(geometric_grid(16, &[3, 16, 40]), vec![2, 3, 4, 8, 16]);
        assert_eq!(geometric_grid(1, &[]), vec![1]);
    }

    #[test]
    fn stabilization_gap_uses_top_half() {
        let d = TrajectoryDiagnostic::new("x", vec![1, 2, 3, 4], vec![10.0, 5.0, 1.5, 1.0], None);
        assert_eq!(d.limit_estimate, 1.0);
        assert!((d.stabilization_gap - 0.5).abs() < 1e-15);
    }

    #[test]
    fn theorem_ids_parse() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert_eq!("aux_ortho".parse::<TheoremId>().unwrap(), TheoremId::AuxOrtho);
        assert!("T9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut o = BTreeMap::new();
        o.insert("limit_abs".to_string(), 0.02);
        let t = Tolerances::with_overrides(TheoremId::T1, &o).unwrap();
        assert_eq!(t.get("limit_abs"), 0.02);
        o.insert("bogus".to_string(), 1.0);
        assert!(Tolerances::with_overrides(TheoremId::T1, &o).is_err());
    }

    #[test]
    fn hypothesis_enforcement() {
        let cg = DistributionSpec::complex_gaussian();
        let rad = DistributionSpec::rademacher();
        let ok = |t, d: &DistributionSpec| ExperimentConfig::new(t, d.clone(), vec![10], 2, 0).validate();
        assert!(ok(TheoremId::T3, &cg).is_ok());
        assert!(matches!(ok(TheoremId::T3, &rad), Err(Error::Hypothesis { .. })));
        assert!(ok(TheoremId::T3, &DistributionSpec::real_gaussian()).is_err());
        assert!(ok(TheoremId::T5, &rad).is_err());
        assert!(ok(TheoremId::T4, &rad).is_ok());
        assert!(ok(TheoremId::Bl, &cg).is_err());
        assert!(ok(TheoremId::Bl, &rad).is_ok());
        assert!(ok(TheoremId::Bl, &DistributionSpec::uniform_symmetric(1.0).unwrap()).is_err());
        assert!(ok(TheoremId::AuxOrtho, &rad).is_err());
        let skew = DistributionSpec::custom_discrete(vec![
            (num_complex::Complex64::new(0.0, 1.0), 0.5),
            (num_complex::Complex64::new(1.0, 0.0), 0.5),
        ])
        .unwrap();
        assert!(ok(TheoremId::T4, &skew).is_err());
        let t2 = ExperimentConfig::new(TheoremId::T2, rad.clone(), vec![10], 2, 0)
            .with_norm(NormSpec::new(1.0, 0.5).unwrap());
        assert!(t2.validate().is_err());
        let t1_wrong_norm = ExperimentConfig::new(TheoremId::T1, cg.clone(), vec![10], 1, 0)
            .with_norm(NormSpec::new(2.0, 0.5).unwrap());
        assert!(t1_wrong_norm.validate().is_err());
    }

    #[test]
    fn structural_validation() {
        let cg = DistributionSpec::complex_gaussian();
        assert!(ExperimentConfig::new(TheoremId::T1, cg.clone(), vec![10], 0, 0).validate().is_err());
        assert!(ExperimentConfig::new(TheoremId::T1, cg.clone(), vec![], 1, 0).validate().is_err());
        assert!(ExperimentConfig::new(TheoremId::T1, cg, vec![10, 5], 1, 0).validate().is_err());
    }
}
