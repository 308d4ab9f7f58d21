use super::{geometric_grid, Check, ExperimentConfig, TrajectoryDiagnostic, Verdict};
use crate::ensembles::sample_trajectory;
use crate::error::Result;
use crate::factor::{factor, l2_factor_trajectory};
use crate::norms::NormSpec;
use crate::poly::Polynomial;
use crate::stats::{median, EstimateResult, Executor};

#[derive(Debug, Clone)]
pub struct SubunitRadiusOutcome {
    /// `M_n` along each trial's stream.
    pub trajectories: Vec<TrajectoryDiagnostic>,
    /// `E[M_n]` at each configured degree.
    pub estimates: Vec<(usize, EstimateResult)>,
    pub max_stabilization_gap: f64,
    /// Every trajectory had `M_n` nondecreasing along the grid (`L²` only).
    pub monotone: Option<bool>,
    pub checks: Vec<Check>,
}

/// Factors on `|z| = r < 1` converge along each nested trajectory and their
/// expectations stay bounded in `n`.
///
/// `L²` factors use the incremental trajectory sums and are also checked for
/// monotonicity in `n`; other norms are recomputed from scratch per degree.
pub fn run_subunit_radius(cfg: &ExperimentConfig, exec: &Executor) -> Result<SubunitRadiusOutcome> {
    cfg.validate()?;
    let r = cfg.norm.radius;
    let gap_tol = cfg.tolerances.get("stabilization");
    let sigmas = cfg.tolerances.get("flatness_sigmas");
    let slack = cfg.tolerances.get("monotone_slack");
    let n_max = cfg.max_degree();
    let grid = geometric_grid(n_max, &cfg.degrees);
    let l2 = cfg.norm.p == 2.0;

    let radii: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let rows = exec.map_trials(cfg.trials, |stream| {
        let traj = sample_trajectory(&cfg.dist, n_max, cfg.seed, stream);
        if l2 {
            let m = l2_factor_trajectory(&traj, r, &grid)?
                .samples
                .iter()
                .map(|s| s.value)
                .collect::<Vec<_>>();
            let scaled = scaled_factor_over_radii(&traj.prefix(n_max), &radii)?;
            let in_r = scaled.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs().max(1.0));
            Ok((m, in_r))
        } else {
            let m = grid
                .iter()
                .map(|&n| Ok(factor(&traj.prefix(n), &cfg.norm)?.value))
                .collect::<Result<Vec<_>>>()?;
            Ok((m, true))
        }
    })?;
    let monotone_in_r = rows.iter().all(|r| r.1);
    let values: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();

    let trajectories: Vec<TrajectoryDiagnostic> = values
        .iter()
        .enumerate()
        .map(|(i, m)| TrajectoryDiagnostic::new(format!("M_n (stream {i})"), grid.clone(), m.clone(), None))
        .collect();
    let max_gap = trajectories.iter().map(|t| t.stabilization_gap).fold(0.0, f64::max);

    let mut checks = vec![Check::new(
        Some(n_max),
        "max stabilization gap",
        EstimateResult::exact(max_gap, cfg.trials, cfg.seed),
        Verdict::from_bool(max_gap <= gap_tol),
        format!("max over trajectories of max |M_n - M_nmax| on the top half of the grid <= {gap_tol}"),
    )];

    let monotone = l2.then(|| {
        values
            .iter()
            .all(|m| m.windows(2).all(|w| w[1] >= w[0] - slack * w[0].abs().max(1.0)))
    });
    if let Some(ok) = monotone {
        checks.push(Check::new(
            None,
            "M_n nondecreasing in n",
            EstimateResult::exact(if ok { 1.0 } else { 0.0 }, cfg.trials, cfg.seed),
            Verdict::from_bool(ok),
            "L2 factor on r < 1 increases along every trajectory",
        ));
        checks.push(Check::new(
            Some(n_max),
            "r M(r) nondecreasing in r",
            EstimateResult::exact(if monotone_in_r { 1.0 } else { 0.0 }, cfg.trials, cfg.seed),
            Verdict::from_bool(monotone_in_r),
            "r times the L2 factor over r = 0.1, ..., 0.9 for every sampled P_nmax",
        ));
    }

    let estimates: Vec<(usize, EstimateResult)> = cfg
        .degrees
        .iter()
        .map(|&n| {
            let idx = grid.binary_search(&n).expect("configured degrees are on the grid");
            let xs: Vec<f64> = values.iter().map(|m| m[idx]).collect();
            (n, EstimateResult::from_samples(&xs, cfg.seed))
        })
        .collect();
    let mut flat = true;
    for (i, (n_a, a)) in estimates.iter().enumerate() {
        for (n_b, b) in &estimates[i + 1..] {
            let bound = sigmas * a.stderr.max(b.stderr);
            let ok = (a.point - b.point).abs() <= bound;
            flat &= ok;
            if !ok {
                checks.push(Check::new(
                    Some(*n_b),
                    format!("|E[M_{n_a}] - E[M_{n_b}]|"),
                    EstimateResult::exact((a.point - b.point).abs(), cfg.trials, cfg.seed),
                    Verdict::Fail,
                    format!("exceeds {sigmas} standard errors ({bound:e})"),
                ));
            }
        }
    }
    for (n, e) in &estimates {
        checks.push(Check::new(
            Some(*n),
            "mean M_n",
            *e,
            Verdict::from_bool(flat && e.point.is_finite()),
            format!("E[M_n] flat across degrees within {sigmas} stderr (r = {r})"),
        ));
    }

    Ok(SubunitRadiusOutcome {
        trajectories,
        estimates,
        max_stabilization_gap: max_gap,
        monotone,
        checks,
    })
}

/// `r·M_n(r)` for the `L²` norm on `|z| = r`, at each radius.
pub fn scaled_factor_over_radii(p: &Polynomial, radii: &[f64]) -> Result<Vec<f64>> {
    radii
        .iter()
        .map(|&r| Ok(r * factor(p, &NormSpec::l2(r)?)?.value))
        .collect()
}

/// Difference between `(R·M_n/n)²` computed from the `k²`-weighted sums and
/// from Abel summation over the partial sums `Y_j = Σ_{k≤j} |A_k|² R^{2k}`:
///
/// `(R·M_n/n)² = 1 - |A_0|²/(n² Y_n) - Σ_{j=1}^{n-1} (2j+1) Y_j / (n² Y_n)`.
///
/// The partial sums are normalised by `R^{2n}`.
pub fn abel_identity_residual(p: &Polynomial, big_r: f64) -> Result<f64> {
    let n = p.formal_degree();
    if n == 0 {
        return Ok(0.0);
    }
    let direct = big_r * factor(p, &NormSpec::l2(big_r)?)?.value / n as f64;
    let ln_r2 = 2.0 * big_r.ln();
    let nf = n as f64;
    let mut y = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for (k, a) in p.coeffs().iter().enumerate() {
        acc += a.norm_sqr() * ((k as f64 - nf) * ln_r2).exp();
        y.push(acc);
    }
    let y_n = y[n];
    if y_n == 0.0 {
        return Ok(direct.abs());
    }
    let a0 = p.coeffs()[0].norm_sqr() * (-nf * ln_r2).exp();
    let tail: f64 = (1..n).map(|j| (2 * j + 1) as f64 * y[j]).sum();
    let via_abel = 1.0 - a0 / (nf * nf * y_n) - tail / (nf * nf * y_n);
    Ok((direct * direct - via_abel).abs())
}

#[derive(Debug, Clone)]
pub struct SuperunitRadiusOutcome {
    /// `E[R·M_n/n]` per degree.
    pub estimates: Vec<(usize, EstimateResult)>,
    pub medians: Vec<(usize, f64)>,
    /// Frequency of `|R·M_n/n - 1| > δ` per degree.
    pub exceedance: Vec<(usize, EstimateResult)>,
    pub max_abel_residual: f64,
    pub inversions: usize,
    pub checks: Vec<Check>,
}

/// `L²` factors on `|z| = R > 1`: `R·M_n/n → 1` in probability. All degrees
/// of one trial are prefixes of one stream.
pub fn run_superunit_radius(cfg: &ExperimentConfig, exec: &Executor) -> Result<SuperunitRadiusOutcome> {
    cfg.validate()?;
    let big_r = cfg.norm.radius;
    let median_tol = cfg.tolerances.get("median_abs");
    let delta = cfg.tolerances.get("delta");
    let max_inv = cfg.tolerances.get("max_inversions");
    let abel_tol = cfg.tolerances.get("abel_residual");
    let n_max = cfg.max_degree();

    let rows = exec.map_trials(cfg.trials, |stream| {
        let traj = sample_trajectory(&cfg.dist, n_max, cfg.seed, stream);
        let f = l2_factor_trajectory(&traj, big_r, &cfg.degrees)?;
        let mut out = Vec::with_capacity(cfg.degrees.len());
        for s in &f.samples {
            let residual = abel_identity_residual(&traj.prefix(s.n), big_r)?;
            out.push((big_r * s.value / s.n.max(1) as f64, residual));
        }
        Ok(out)
    })?;

    let mut checks = Vec::new();
    let max_abel = rows.iter().flatten().map(|r| r.1).fold(0.0, f64::max);
    checks.push(Check::new(
        None,
        "max Abel identity residual",
        EstimateResult::exact(max_abel, cfg.trials * cfg.degrees.len(), cfg.seed),
        Verdict::from_bool(max_abel <= abel_tol),
        format!("|(R M_n/n)^2 - Abel form| <= {abel_tol:e} on every sample"),
    ));

    let mut estimates = Vec::new();
    let mut medians = Vec::new();
    let mut exceedance = Vec::new();
    for (i, &n) in cfg.degrees.iter().enumerate() {
        let xs: Vec<f64> = rows.iter().map(|r| r[i].0).collect();
        let e = EstimateResult::from_samples(&xs, cfg.seed);
        let med = EstimateResult::quantile(&xs, 0.5, cfg.seed);
        let hits = xs.iter().filter(|x| (*x - 1.0).abs() > delta).count();
        let freq = EstimateResult::proportion(hits, xs.len(), cfg.seed);
        checks.push(Check::new(Some(n), "mean R M_n/n", e, Verdict::Info, "limit 1"));
        checks.push(Check::new(
            Some(n),
            "median R M_n/n",
            med,
            if n == n_max {
                Verdict::from_bool((med.point - 1.0).abs() <= median_tol)
            } else {
                Verdict::Info
            },
            format!("|median - 1| <= {median_tol} at the largest degree"),
        ));
        checks.push(Check::new(
            Some(n),
            format!("P(|R M_n/n - 1| > {delta})"),
            freq,
            Verdict::Info,
            "exceedance frequency",
        ));
        estimates.push((n, e));
        medians.push((n, median(&xs)));
        exceedance.push((n, freq));
    }
    let inversions = exceedance.windows(2).filter(|w| w[1].1.point > w[0].1.point).count();
    checks.push(Check::new(
        None,
        "exceedance inversions",
        EstimateResult::exact(inversions as f64, cfg.trials, cfg.seed),
        Verdict::from_bool(inversions as f64 <= max_inv),
        format!("exceedance frequency nonincreasing in n, up to {max_inv} inversions"),
    ));

    Ok(SuperunitRadiusOutcome {
        estimates,
        medians,
        exceedance,
        max_abel_residual: max_abel,
        inversions,
        checks,
    })
}
