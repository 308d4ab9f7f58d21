//! Quick built-in checks of exact identities and closed forms; used by the
//! `selftest` subcommand.

use num_complex::Complex64;

use crate::ensembles::{sample_coefficients, CoefficientTrajectory, DistributionSpec};
use crate::experiments::{roots_of_unity_grid_sum, ExperimentConfig, TheoremId};
use crate::factor::{factor, l2_factor_trajectory};
use crate::norms::{l2_norm, lp_norm, sup_norm, NormSpec};
use crate::poly::{conjugate_reciprocal, derivative, dilate, evaluate, evaluate_on_grid, CircleGrid, Polynomial};
use crate::report::parse_config_str;
use crate::stats::{monte_carlo_expectation, Executor, TrialPlan};

#[derive(Debug, Clone)]
pub struct SelftestResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn close_poly(a: &Polynomial, b: &Polynomial) -> bool {
    a.coeffs().len() == b.coeffs().len() && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= 1e-15)
}

type Case = (&'static str, fn() -> Result<String, String>);

fn ok_if(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

const CASES: &[Case] = &[
    ("derivative of 1 + z + z^2", || {
        let d = derivative(&Polynomial::from_real(&[1.0, 1.0, 1.0]));
        ok_if(close_poly(&d, &Polynomial::from_real(&[1.0, 2.0])), format!("{:?}", d.coeffs()))
    }),
    ("derivative of z^n and of a constant", || {
        let ok = (1..20).all(|n| {
            close_poly(&derivative(&Polynomial::monomial(n, c(1.0, 0.0))), &Polynomial::monomial(n - 1, c(n as f64, 0.0)))
        }) && derivative(&Polynomial::constant(c(5.0, 0.0))).is_zero();
        ok_if(ok, String::new())
    }),
    ("evaluate at 1 and at 0", || {
        let p = Polynomial::new(vec![c(0.3, -2.0), c(1.0, 1.0), c(4.0, 0.0)]);
        let ok = evaluate(&Polynomial::from_real(&[1.0, 1.0]), c(1.0, 0.0)) == c(2.0, 0.0)
            && evaluate(&p, c(0.0, 0.0)) == p.coeffs()[0];
        ok_if(ok, String::new())
    }),
    ("z on 4 roots of unity", || {
        let v = evaluate_on_grid(&Polynomial::monomial(1, c(1.0, 0.0)), &CircleGrid::unit(4).map_err(err)?);
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        ok_if(v.iter().zip(want).all(|(a, b)| (a - b).norm() < 1e-15), format!("{v:?}"))
    }),
    ("dilation and conjugate reciprocal", || {
        let p = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        let ok = close_poly(&dilate(&p, 1.0), &p)
            && close_poly(&dilate(&Polynomial::monomial(2, c(1.0, 0.0)), 0.5), &Polynomial::monomial(2, c(0.25, 0.0)))
            && close_poly(&conjugate_reciprocal(&Polynomial::from_real(&[1.0, 2.0])), &Polynomial::from_real(&[2.0, 1.0]))
            && close_poly(&conjugate_reciprocal(&Polynomial::from_real(&[1.0, 0.0, 1.0])), &Polynomial::from_real(&[1.0, 0.0, 1.0]));
        ok_if(ok, String::new())
    }),
    ("L2 norms of 1 + z and z^n", || {
        let a = l2_norm(&Polynomial::from_real(&[1.0, 1.0]), 1.0);
        let b = l2_norm(&Polynomial::monomial(7, c(1.0, 0.0)), 0.6);
        ok_if(close(a, 2f64.sqrt(), 1e-15) && close(b, 0.6f64.powi(7), 1e-15), format!("{a} {b}"))
    }),
    ("L4 norm of 1 + z is 6^(1/4)", || {
        let q = lp_norm(&Polynomial::from_real(&[1.0, 1.0]), &NormSpec::new(4.0, 1.0).map_err(err)?).map_err(err)?;
        ok_if(close(q.value, 6f64.powf(0.25), 1e-9), format!("{}", q.value))
    }),
    ("Lp norm of a constant", || {
        let p = Polynomial::constant(c(3.0, 4.0));
        let ok = [0.5, 1.0, 3.0].iter().all(|&pp| {
            lp_norm(&p, &NormSpec::new(pp, 0.7).unwrap())
                .map(|q| close(q.value, 5.0, 1e-12))
                .unwrap_or(false)
        });
        ok_if(ok, String::new())
    }),
    ("sup enclosure of z^n", || {
        let eps = 0.01;
        let e = sup_norm(&Polynomial::monomial(9, c(1.0, 0.0)), &NormSpec::sup(1.0).map_err(err)?.with_sup_eps(eps).map_err(err)?)
            .map_err(err)?;
        ok_if(close(e.lower, 1.0, 1e-12) && close(e.upper, 1.0 / (1.0 - eps), 1e-12), format!("{e:?}"))
    }),
    ("L2 factor of 1 + z + z^2 is sqrt(5/3)", || {
        let f = factor(&Polynomial::from_real(&[1.0, 1.0, 1.0]), &NormSpec::l2(1.0).map_err(err)?).map_err(err)?;
        ok_if(close(f.value, (5.0f64 / 3.0).sqrt(), 1e-14), format!("{}", f.value))
    }),
    ("trajectory (1, 1) gives M_1 = 1/sqrt(2)", || {
        let t = CoefficientTrajectory::from_values(DistributionSpec::rademacher(), 0, 0, vec![c(1.0, 0.0); 2]).map_err(err)?;
        let m = l2_factor_trajectory(&t, 1.0, &[1]).map_err(err)?.samples[0].value;
        ok_if(close(m, 0.5f64.sqrt(), 1e-15), format!("{m}"))
    }),
    ("constant stream: M_n/n = sqrt((2n+1)/(6n))", || {
        let n_max = 10_000;
        let t = CoefficientTrajectory::from_values(DistributionSpec::rademacher(), 0, 0, vec![c(1.0, 0.0); n_max + 1]).map_err(err)?;
        let ns: Vec<usize> = (1..=n_max).collect();
        let f = l2_factor_trajectory(&t, 1.0, &ns).map_err(err)?;
        let worst = f
            .samples
            .iter()
            .map(|s| {
                let n = s.n as f64;
                (s.value / n - ((2.0 * n + 1.0) / (6.0 * n)).sqrt()).abs()
            })
            .fold(0.0, f64::max);
        ok_if(worst <= 1e-12, format!("max deviation {worst:e}"))
    }),
    ("sampling determinism", || {
        let s = DistributionSpec::complex_gaussian();
        let ok = sample_coefficients(&s, 50, 9, 3) == sample_coefficients(&s, 50, 9, 3)
            && sample_coefficients(&s, 0, 9, 3).coeffs().len() == 1;
        ok_if(ok, String::new())
    }),
    ("Monte Carlo of a constant statistic", || {
        let plan = TrialPlan {
            dist: DistributionSpec::complex_gaussian(),
            degree: 5,
            trials: 100,
            seed: 1,
        };
        let e = monte_carlo_expectation(&plan, &Executor::global(), |_| Ok(1.0)).map_err(err)?;
        ok_if(e.point == 1.0 && e.stderr == 0.0, format!("{e:?}"))
    }),
    ("E|A_0|^2 = 1 under complex_gaussian", || {
        let plan = TrialPlan {
            dist: DistributionSpec::complex_gaussian(),
            degree: 0,
            trials: 10_000,
            seed: 0,
        };
        let e = monte_carlo_expectation(&plan, &Executor::global(), |p| Ok(p.coeffs()[0].norm_sqr())).map_err(err)?;
        ok_if((e.point - 1.0).abs() <= 3.0 * e.stderr, format!("{:.5} +- {:.5}", e.point, e.stderr))
    }),
    ("worker count does not change estimates", || {
        let plan = TrialPlan {
            dist: DistributionSpec::real_gaussian(),
            degree: 64,
            trials: 200,
            seed: 5,
        };
        let stat = |p: &Polynomial| Ok(l2_norm(&derivative(p), 1.0));
        let a = monte_carlo_expectation(&plan, &Executor::with_workers(1).map_err(err)?, stat).map_err(err)?;
        let b = monte_carlo_expectation(&plan, &Executor::with_workers(4).map_err(err)?, stat).map_err(err)?;
        ok_if(a == b, format!("{a:?} vs {b:?}"))
    }),
    ("roots-of-unity grid sums vanish", || {
        let worst = [4, 16, 33].iter().map(|&n| roots_of_unity_grid_sum(n)).fold(0.0, f64::max);
        ok_if(worst <= 1e-12, format!("{worst:e}"))
    }),
    ("config validation", || {
        let minimal = "theorem_id = \"T1\"\ndist = \"complex_gaussian\"\ndegrees = [5000]\ntrials = 1\nseed = 7\n";
        let cfgs = parse_config_str(minimal).map_err(err)?;
        let t3 = ExperimentConfig::new(TheoremId::T3, DistributionSpec::rademacher(), vec![10], 1, 1);
        let ok = cfgs.len() == 1
            && matches!(t3.validate(), Err(crate::Error::Hypothesis { .. }))
            && parse_config_str(&minimal.replace("trials = 1", "trials = 0")).is_err();
        ok_if(ok, String::new())
    }),
];

/// Runs every built-in check.
pub fn run_selftest() -> Vec<SelftestResult> {
    CASES
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SelftestResult { name, passed, detail }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for r in super::run_selftest() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
