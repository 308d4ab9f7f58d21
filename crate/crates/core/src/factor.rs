//! Bernstein-Markov factors `M_n(P) = ‖P'‖ / ‖P‖`.
//!
//! The factor of the zero polynomial is defined to be 0, which also covers
//! every constant polynomial. Sup-norm factors are interval valued: with
//! enclosures `[l', u']` for `‖P'‖∞` and `[l, u]` for `‖P‖∞` the factor lies in
//! `[l'/u, u'/l]`, and the midpoint is reported as the representative value.

use crate::ensembles::CoefficientTrajectory;
use crate::error::{Error, Result};
use crate::norms::{lp_norm_scaled, sup_norm_scaled, NormSpec};
use crate::poly::{conjugate_reciprocal, derivative, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorSample {
    pub n: usize,
    pub value: f64,
    pub norm: NormSpec,
    /// `(lower, upper)` bracket, present for sup norms.
    pub enclosure_bounds: Option<(f64, f64)>,
}

impl FactorSample {
    /// Lower end of the certified bracket, or the value itself.
    pub fn lower(&self) -> f64 {
        self.enclosure_bounds.map_or(self.value, |b| b.0)
    }

    pub fn upper(&self) -> f64 {
        self.enclosure_bounds.map_or(self.value, |b| b.1)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

/// `‖P'‖ / ‖P‖` under `spec`.
pub fn factor(p: &Polynomial, spec: &NormSpec) -> Result<FactorSample> {
    let n = p.formal_degree();
    let zero = FactorSample {
        n,
        value: 0.0,
        norm: *spec,
        enclosure_bounds: spec.is_sup().then_some((0.0, 0.0)),
    };
    if p.is_zero() {
        return Ok(zero);
    }
    let d = derivative(p);
    if spec.is_sup() {
        let (lo, hi) = sup_norm_scaled(p, spec)?;
        let (dlo, dhi) = sup_norm_scaled(&d, spec)?;
        let lower = dlo.ratio(hi);
        let upper = dhi.ratio(lo);
        return Ok(FactorSample {
            value: 0.5 * (lower + upper),
            enclosure_bounds: Some((lower, upper)),
            ..zero
        });
    }
    let value = if spec.p == 2.0 {
        l2_factor(p.coeffs().iter().map(|a| a.norm_sqr()), spec.radius)
    } else {
        let (num, _, _) = lp_norm_scaled(&d, spec)?;
        let (den, _, _) = lp_norm_scaled(p, spec)?;
        num.ratio(den)
    };
    Ok(FactorSample { value, ..zero })
}

/// `L²` factor from `|A_k|²`:
/// `√(Σ k²|A_k|² r^{2k-2} / Σ |A_k|² r^{2k})`, with the weights normalised
/// by `r^{2n}` when `r > 1` so nothing overflows.
fn l2_factor(moduli_sq: impl ExactSizeIterator<Item = f64>, r: f64) -> f64 {
    let n = moduli_sq.len().saturating_sub(1);
    let ln_r2 = 2.0 * r.ln();
    let shift = if r > 1.0 { n as f64 } else { 0.0 };
    let (mut num, mut den) = (0.0, 0.0);
    for (k, a2) in moduli_sq.enumerate() {
        let w = if r == 1.0 { 1.0 } else { ((k as f64 - shift) * ln_r2).exp() };
        let t = a2 * w;
        den += t;
        num += (k * k) as f64 * t;
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt() / r
    }
}

/// Running prefix sums behind the incremental `L²` factor on `|z| = r`:
/// `s0 = Σ_{k≤n} |A_k|² r^{2k}` and `s1 = Σ_{1≤k≤n} k²|A_k|² r^{2k-2}`.
///
/// For `r > 1` both sums are stored divided by `r^{2n}` (and re-normalised on
/// each push) so that long trajectories do not overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct L2TrajectoryState {
    s0: f64,
    s1: f64,
    n: Option<usize>,
    r: f64,
}

impl L2TrajectoryState {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        Ok(Self { s0: 0.0, s1: 0.0, n: None, r })
    }

    fn rescaled(&self) -> bool {
        self.r > 1.0
    }

    /// Appends `A_{n+1}`.
    pub fn push(&mut self, a_sq: f64) {
        let k = self.n.map_or(0, |n| n + 1);
        let r2 = self.r * self.r;
        if self.rescaled() {
            self.s0 = self.s0 / r2 + a_sq;
            self.s1 = self.s1 / r2 + (k * k) as f64 * a_sq / r2;
        } else {
            let w = r2.powi(k as i32);
            self.s0 += a_sq * w;
            if k > 0 {
                self.s1 += (k * k) as f64 * a_sq * w / r2;
            }
        }
        self.n = Some(k);
    }

    pub fn degree(&self) -> Option<usize> {
        self.n
    }

    /// `s0`; may be infinite for long trajectories on `r > 1`.
    pub fn s0(&self) -> f64 {
        self.unscale(self.s0)
    }

    pub fn s1(&self) -> f64 {
        self.unscale(self.s1)
    }

    fn unscale(&self, s: f64) -> f64 {
        match (self.rescaled(), self.n) {
            (true, Some(n)) if s > 0.0 => (s.ln() + 2.0 * n as f64 * self.r.ln()).exp(),
            _ => s,
        }
    }

    /// `√(s1/s0)`, or 0 for an all-zero prefix.
    pub fn factor(&self) -> f64 {
        if self.s0 == 0.0 {
            0.0
        } else {
            (self.s1 / self.s0).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2TrajectoryFactors {
    pub samples: Vec<FactorSample>,
    /// Requested degrees whose prefix was identically zero (reported as 0).
    pub degenerate_at: Vec<usize>,
}

/// `L²` factors on `|z| = r` of the nested prefixes `P_n` of one trajectory,
/// for each requested `n`, with O(1) work per coefficient.
pub fn l2_factor_trajectory(
    traj: &CoefficientTrajectory,
    r: f64,
    n_values: &[usize],
) -> Result<L2TrajectoryFactors> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n_values must be strictly increasing".into()));
    }
    if let Some(&last) = n_values.last() {
        if last > traj.n_max() {
            return Err(Error::InvalidArgument(format!(
                "requested degree {last} exceeds trajectory length {}",
                traj.n_max()
            )));
        }
    }
    let norm = NormSpec::l2(r)?;
    let mut state = L2TrajectoryState::new(r)?;
    let mut out = L2TrajectoryFactors {
        samples: Vec::with_capacity(n_values.len()),
        degenerate_at: Vec::new(),
    };
    let mut next = n_values.iter().peekable();
    for (k, a) in traj.values().iter().enumerate() {
        let Some(&&want) = next.peek() else { break };
        state.push(a.norm_sqr());
        if k == want {
            if state.s0 == 0.0 {
                out.degenerate_at.push(k);
            }
            out.samples.push(FactorSample {
                n: k,
                value: state.factor(),
                norm,
                enclosure_bounds: None,
            });
            next.next();
        }
    }
    Ok(out)
}

/// Outcome of checking `M(p) + M(q) ≥ n` for `q` the conjugate reciprocal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocalPairCheck {
    pub n: usize,
    pub m_p: FactorSample,
    pub m_q: FactorSample,
    /// Sum of the certified lower ends.
    pub sum_lower: f64,
    /// Sum of the certified upper ends; must be at least `n`.
    pub sum_upper: f64,
}

impl ReciprocalPairCheck {
    pub fn holds(&self) -> bool {
        self.sum_upper >= self.n as f64
    }

    /// How far the certified lower sum falls below `n(1-ε)²`; zero or
    /// negative when the lower sum alone already certifies the bound.
    pub fn slack(&self, eps: f64) -> f64 {
        self.n as f64 * (1.0 - eps).powi(2) - self.sum_lower
    }
}

pub fn reciprocal_pair_check(p: &Polynomial, eps: f64) -> Result<ReciprocalPairCheck> {
    let n = p.formal_degree();
    if n < 1 {
        return Err(Error::InvalidArgument("reciprocal pair check needs degree ≥ 1".into()));
    }
    if p.is_zero() {
        return Err(Error::InvalidArgument("zero polynomial has no reciprocal pair".into()));
    }
    let spec = NormSpec::sup(1.0)?.with_sup_eps(eps)?;
    let q = conjugate_reciprocal(p);
    let m_p = factor(p, &spec)?;
    let m_q = factor(&q, &spec)?;
    Ok(ReciprocalPairCheck {
        n,
        m_p,
        m_q,
        sum_lower: m_p.lower() + m_q.lower(),
        sum_upper: m_p.upper() + m_q.upper(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfReciprocalCheck {
    pub factor: FactorSample,
    pub target: f64,
    pub contains_target: bool,
}

/// The sup-norm factor of a self-reciprocal polynomial is `n/2`; checks that
/// the certified bracket, widened by its own width, contains it.
pub fn self_reciprocal_factor_check(p: &Polynomial, eps: f64) -> Result<SelfReciprocalCheck> {
    let q = conjugate_reciprocal(p);
    let scale = p.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mismatch = p
        .coeffs()
        .iter()
        .zip(q.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if mismatch > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "polynomial is not self-reciprocal (max coefficient mismatch {mismatch:e})"
        )));
    }
    let spec = NormSpec::sup(1.0)?.with_sup_eps(eps)?;
    let f = factor(p, &spec)?;
    let target = p.formal_degree() as f64 / 2.0;
    let width = f.upper() - f.lower();
    Ok(SelfReciprocalCheck {
        factor: f,
        target,
        contains_target: f.lower() - width <= target && target <= f.upper() + width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_coefficients, sample_trajectory, DistributionSpec};
    use num_complex::Complex64;

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn monomial_sup_factor_is_degree() {
        let spec = NormSpec::sup(1.0).unwrap();
        for n in [1, 5, 40] {
            let f = factor(&Polynomial::monomial(n, c1()), &spec).unwrap();
            assert!(f.contains(n as f64), "{f:?}");
        }
    }

    #[test]
    fn constant_and_zero_have_factor_zero() {
        for spec in [NormSpec::sup(1.0).unwrap(), NormSpec::l2(0.5).unwrap(), NormSpec::new(3.0, 1.0).unwrap()] {
            let f = factor(&Polynomial::constant(Complex64::new(2.0, 1.0)), &spec).unwrap();
            assert_eq!(f.value, 0.0);
            let z = factor(&Polynomial::zero(6), &spec).unwrap();
            assert_eq!(z.value, 0.0);
            assert_eq!(z.n, 6);
        }
    }

    #[test]
    fn l2_factor_of_one_plus_z_plus_z2() {
        let f = factor(&Polynomial::from_real(&[1.0, 1.0, 1.0]), &NormSpec::l2(1.0).unwrap()).unwrap();
        assert!((f.value - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(f.enclosure_bounds.is_none());
    }

    #[test]
    fn l2_factor_matches_quadrature_on_other_radii() {
        let p = sample_coefficients(&DistributionSpec::complex_gaussian(), 30, 1, 2);
        for r in [0.5, 1.0, 2.0] {
            let exact = factor(&p, &NormSpec::l2(r).unwrap()).unwrap().value;
            let d = derivative(&p);
            let spec = NormSpec::l2(r).unwrap();
            let quad = crate::norms::lp_norm(&d, &spec).unwrap().value
                / crate::norms::lp_norm(&p, &spec).unwrap().value;
            assert!((exact - quad).abs() <= 1e-10 * exact, "{r}: {exact} vs {quad}");
        }
    }

    #[test]
    fn trajectory_closed_form_for_constant_stream() {
        let spec = DistributionSpec::constant(c1()).unwrap();
        let traj = sample_trajectory(&spec, 200, 0, 0);
        let ns: Vec<usize> = (1..=200).collect();
        let out = l2_factor_trajectory(&traj, 1.0, &ns).unwrap();
        for s in &out.samples {
            let n = s.n as f64;
            // Σk² / (n+1) = n(2n+1)/6
            let expect = (n * (2.0 * n + 1.0) / 6.0).sqrt();
            assert!((s.value - expect).abs() <= 1e-13 * expect);
        }
        assert!((out.samples[1].value - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((out.samples[0].value - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn trajectory_flags_degenerate_prefixes() {
        let spec = DistributionSpec::custom_discrete(vec![
            (Complex64::new(0.0, 0.0), 0.5),
            (c1(), 0.5),
        ])
        .unwrap();
        let mut found = false;
        for stream in 0..32 {
            let traj = sample_trajectory(&spec, 3, 1, stream);
            if traj.values()[0].norm() == 0.0 {
                let out = l2_factor_trajectory(&traj, 1.0, &[0]).unwrap();
                assert_eq!(out.degenerate_at, vec![0]);
                assert_eq!(out.samples[0].value, 0.0);
                found = true;
            }
        }
        assert!(found);
    }

    #[test]
    fn trajectory_argument_errors() {
        let traj = sample_trajectory(&DistributionSpec::rademacher(), 10, 0, 0);
        assert!(l2_factor_trajectory(&traj, 1.0, &[3, 3]).is_err());
        assert!(l2_factor_trajectory(&traj, 1.0, &[11]).is_err());
        assert!(l2_factor_trajectory(&traj, 0.0, &[1]).is_err());
        assert!(l2_factor_trajectory(&traj, 1.0, &[]).unwrap().samples.is_empty());
    }

    #[test]
    fn state_sums_are_recoverable_on_large_radius() {
        let mut st = L2TrajectoryState::new(2.0).unwrap();
        for _ in 0..4 {
            st.push(1.0);
        }
        // s0 = 1 + 4 + 16 + 64, s1 = 1 + 4·4 + 9·16
        assert!((st.s0() - 85.0).abs() < 1e-12);
        assert!((st.s1() - 161.0).abs() < 1e-12);
        assert!((st.factor() - (161.0f64 / 85.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_pair_examples() {
        let c = reciprocal_pair_check(&Polynomial::from_real(&[1.0, 1.0]), 0.01).unwrap();
        assert!(c.m_p.contains(0.5) && c.m_q.contains(0.5));
        assert!(c.holds());
        let c = reciprocal_pair_check(&Polynomial::monomial(7, c1()), 0.01).unwrap();
        assert!(c.m_p.contains(7.0));
        assert_eq!(c.m_q.value, 0.0);
        assert!(c.holds());
        assert!(reciprocal_pair_check(&Polynomial::constant(c1()), 0.01).is_err());
        assert!(reciprocal_pair_check(&Polynomial::zero(3), 0.01).is_err());
    }

    #[test]
    fn self_reciprocal_examples() {
        let c = self_reciprocal_factor_check(&Polynomial::from_real(&[1.0, 0.0, 1.0]), 0.01).unwrap();
        assert_eq!(c.target, 1.0);
        assert!(c.factor.contains(1.0));
        let c = self_reciprocal_factor_check(&Polynomial::from_real(&[1.0, 1.0]), 0.01).unwrap();
        assert!(c.contains_target);
        assert!(self_reciprocal_factor_check(&Polynomial::from_real(&[1.0, 2.0]), 0.01).is_err());
    }

    #[test]
    fn product_with_reciprocal_is_self_reciprocal() {
        for seed in 0..5 {
            let p = sample_coefficients(&DistributionSpec::complex_gaussian(), 10, seed, 0);
            let s = p.mul(&conjugate_reciprocal(&p));
            let c = self_reciprocal_factor_check(&s, 0.01).unwrap();
            assert_eq!(c.target, 10.0);
            assert!(c.contains_target, "{c:?}");
        }
    }
}
