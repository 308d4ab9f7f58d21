//! I.i.d. coefficient laws and reproducible coefficient streams.
//!
//! Every coefficient `A_k` is a pure function of `(law, seed, stream_id, k)`:
//! the stream is a ChaCha20 keystream selected by `seed` and `stream_id`, and
//! coefficient `k` always consumes the same fixed block of keystream words.
//! Trajectories with the same seed and stream are therefore nested prefixes
//! of one infinite sequence, whatever order trials are generated in.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// 32-bit keystream words consumed per coefficient (two `u64` draws).
const WORDS_PER_COEFF: u128 = 4;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    /// `N_C(0,1)`: independent real and imaginary parts, each `N(0, 1/2)`.
    ComplexGaussian,
    RealGaussian,
    Rademacher,
    /// Uniform on `[-half_width, half_width]`.
    UniformSymmetric { half_width: f64 },
    /// Finitely many complex atoms with probabilities.
    CustomDiscrete { atoms: Vec<(Complex64, f64)> },
}

/// Hypothesis flags used by experiments to refuse laws a theorem does not
/// cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capabilities {
    /// `E|A|²`
    pub second_moment: f64,
    /// `E[A]`
    pub mean: Complex64,
    /// All moments are finite (every supported kind is bounded or Gaussian).
    pub all_moments_finite: bool,
    /// `|A|` has a bounded density on some `[0, ε]`.
    pub abs_density_near_zero: bool,
    /// `|A|²` has a bounded density on some `[0, ε]`.
    pub sq_density_near_zero: bool,
    /// The law of `A` equals the law of `conj(A)`.
    pub conjugation_invariant: bool,
    pub real_valued: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpec {
    kind: DistributionKind,
    /// Cumulative probabilities for `CustomDiscrete`, empty otherwise.
    cumulative: Vec<f64>,
}

impl DistributionSpec {
    pub fn complex_gaussian() -> Self {
        Self::from_checked(DistributionKind::ComplexGaussian)
    }

    pub fn real_gaussian() -> Self {
        Self::from_checked(DistributionKind::RealGaussian)
    }

    pub fn rademacher() -> Self {
        Self::from_checked(DistributionKind::Rademacher)
    }

    /// Uniform on `[-a, a]`; `a = √3` gives unit variance.
    pub fn uniform_symmetric(half_width: f64) -> Result<Self> {
        Self::new(DistributionKind::UniformSymmetric { half_width })
    }

    pub fn custom_discrete(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        Self::new(DistributionKind::CustomDiscrete { atoms })
    }

    /// The degenerate law `A ≡ c` (c ≠ 0), handy for closed-form checks.
    pub fn constant(c: Complex64) -> Result<Self> {
        Self::custom_discrete(vec![(c, 1.0)])
    }

    pub fn new(kind: DistributionKind) -> Result<Self> {
        match &kind {
            DistributionKind::UniformSymmetric { half_width } => {
                if !(half_width.is_finite() && *half_width > 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform half width must be positive and finite, got {half_width}"
                    )));
                }
            }
            DistributionKind::CustomDiscrete { atoms } => validate_atoms(atoms)?,
            _ => {}
        }
        Ok(Self::from_checked(kind))
    }

    fn from_checked(kind: DistributionKind) -> Self {
        let cumulative = match &kind {
            DistributionKind::CustomDiscrete { atoms } => atoms
                .iter()
                .scan(0.0, |acc, (_, p)| {
                    *acc += p;
                    Some(*acc)
                })
                .collect(),
            _ => Vec::new(),
        };
        Self { kind, cumulative }
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DistributionKind::ComplexGaussian => "complex_gaussian",
            DistributionKind::RealGaussian => "real_gaussian",
            DistributionKind::Rademacher => "rademacher",
            DistributionKind::UniformSymmetric { .. } => "uniform_symmetric",
            DistributionKind::CustomDiscrete { .. } => "custom_discrete",
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        let zero = Complex64::new(0.0, 0.0);
        match &self.kind {
            DistributionKind::ComplexGaussian => Capabilities {
                second_moment: 1.0,
                mean: zero,
                all_moments_finite: true,
                abs_density_near_zero: true,
                sq_density_near_zero: true,
                conjugation_invariant: true,
                real_valued: false,
            },
            // |A|² is chi-square(1): its density blows up like 1/√x at 0.
            DistributionKind::RealGaussian => Capabilities {
                second_moment: 1.0,
                mean: zero,
                all_moments_finite: true,
                abs_density_near_zero: true,
                sq_density_near_zero: false,
                conjugation_invariant: true,
                real_valued: true,
            },
            DistributionKind::Rademacher => Capabilities {
                second_moment: 1.0,
                mean: zero,
                all_moments_finite: true,
                abs_density_near_zero: false,
                sq_density_near_zero: false,
                conjugation_invariant: true,
                real_valued: true,
            },
            DistributionKind::UniformSymmetric { half_width } => Capabilities {
                second_moment: half_width * half_width / 3.0,
                mean: zero,
                all_moments_finite: true,
                abs_density_near_zero: true,
                sq_density_near_zero: false,
                conjugation_invariant: true,
                real_valued: true,
            },
            DistributionKind::CustomDiscrete { atoms } => Capabilities {
                second_moment: atoms.iter().map(|(v, p)| v.norm_sqr() * p).sum(),
                mean: atoms.iter().map(|(v, p)| v * p).sum(),
                all_moments_finite: true,
                abs_density_near_zero: false,
                sq_density_near_zero: false,
                conjugation_invariant: discrete_conjugation_invariant(atoms),
                real_valued: atoms.iter().all(|(v, _)| v.im == 0.0),
            },
        }
    }

    /// Maps two raw keystream words to one coefficient.
    fn draw(&self, x1: u64, x2: u64) -> Complex64 {
        match &self.kind {
            DistributionKind::ComplexGaussian => {
                // |A|² = -ln U is exactly unit-rate exponential.
                let rho = (-open_unit(x1).ln()).sqrt();
                Complex64::from_polar(rho, TAU * half_open_unit(x2))
            }
            DistributionKind::RealGaussian => {
                let rho = (-2.0 * open_unit(x1).ln()).sqrt();
                Complex64::new(rho * (TAU * half_open_unit(x2)).cos(), 0.0)
            }
            DistributionKind::Rademacher => {
                Complex64::new(if x1 >> 63 == 0 { -1.0 } else { 1.0 }, 0.0)
            }
            DistributionKind::UniformSymmetric { half_width } => {
                Complex64::new(half_width * (2.0 * half_open_unit(x1) - 1.0), 0.0)
            }
            DistributionKind::CustomDiscrete { atoms } => {
                let u = half_open_unit(x1) * self.cumulative[self.cumulative.len() - 1];
                let idx = self
                    .cumulative
                    .partition_point(|&c| c <= u)
                    .min(atoms.len() - 1);
                atoms[idx].0
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DistributionKind::UniformSymmetric { half_width } => {
                write!(f, "uniform_symmetric(a={half_width})")
            }
            DistributionKind::CustomDiscrete { atoms } => {
                write!(f, "custom_discrete({} atoms)", atoms.len())
            }
            _ => f.write_str(self.name()),
        }
    }
}

fn validate_atoms(atoms: &[(Complex64, f64)]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::InvalidDistribution("custom_discrete needs at least one atom".into()));
    }
    for (v, p) in atoms {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidDistribution(format!("atom {v} is not finite")));
        }
        if !(p.is_finite() && *p >= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "atom probability {p} is negative or not finite"
            )));
        }
    }
    let total: f64 = atoms.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!(
            "atom probabilities sum to {total}, expected 1"
        )));
    }
    let p_zero: f64 = atoms
        .iter()
        .filter(|(v, _)| v.re == 0.0 && v.im == 0.0)
        .map(|(_, p)| p)
        .sum();
    if p_zero >= 1.0 - 1e-12 {
        return Err(Error::InvalidDistribution(
            "law is trivial: P(A = 0) must be < 1".into(),
        ));
    }
    Ok(())
}

fn discrete_conjugation_invariant(atoms: &[(Complex64, f64)]) -> bool {
    let mass_at = |target: Complex64| -> f64 {
        atoms
            .iter()
            .filter(|(v, _)| *v == target)
            .map(|(_, p)| p)
            .sum()
    };
    atoms
        .iter()
        .all(|(v, _)| (mass_at(*v) - mass_at(v.conj())).abs() <= 1e-12)
}

/// Uniform on `(0, 1]`, safe for `ln`.
fn open_unit(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * TWO_POW_M53
}

/// Uniform on `[0, 1)`.
fn half_open_unit(x: u64) -> f64 {
    (x >> 11) as f64 * TWO_POW_M53
}

/// Positioned reader over one `(seed, stream_id)` keystream.
struct CoefficientStream<'a> {
    spec: &'a DistributionSpec,
    rng: ChaCha20Rng,
}

impl<'a> CoefficientStream<'a> {
    fn at(spec: &'a DistributionSpec, seed: u64, stream_id: u64, k: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        rng.set_word_pos(k as u128 * WORDS_PER_COEFF);
        Self { spec, rng }
    }

    fn next_coeff(&mut self) -> Complex64 {
        let x1 = self.rng.next_u64();
        let x2 = self.rng.next_u64();
        self.spec.draw(x1, x2)
    }
}

/// `P_n` with i.i.d. coefficients `A_0..A_n` drawn from `spec`.
pub fn sample_coefficients(spec: &DistributionSpec, n: usize, seed: u64, stream_id: u64) -> Polynomial {
    sample_range(spec, 0, n + 1, seed, stream_id).into()
}

/// Coefficients `A_start..A_{start+len-1}` of a stream, without generating
/// the earlier ones.
pub fn sample_range(
    spec: &DistributionSpec,
    start: usize,
    len: usize,
    seed: u64,
    stream_id: u64,
) -> Vec<Complex64> {
    let mut stream = CoefficientStream::at(spec, seed, stream_id, start as u64);
    (0..len).map(|_| stream.next_coeff()).collect()
}

impl From<Vec<Complex64>> for Polynomial {
    fn from(coeffs: Vec<Complex64>) -> Self {
        Polynomial::new(coeffs)
    }
}

/// One seeded coefficient stream truncated at `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrajectory {
    spec: DistributionSpec,
    seed: u64,
    stream_id: u64,
    values: Vec<Complex64>,
}

impl CoefficientTrajectory {
    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// The partial sum `P_n`. Panics if `n > n_max`.
    pub fn prefix(&self, n: usize) -> Polynomial {
        assert!(n <= self.n_max(), "prefix degree {n} beyond trajectory end {}", self.n_max());
        Polynomial::new(self.values[..=n].to_vec())
    }

    /// Builds a trajectory from explicit values, e.g. a deterministic stream.
    pub fn from_values(spec: DistributionSpec, seed: u64, stream_id: u64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs at least A_0".into()));
        }
        Ok(Self {
            spec,
            seed,
            stream_id,
            values,
        })
    }
}

pub fn sample_trajectory(
    spec: &DistributionSpec,
    n_max: usize,
    seed: u64,
    stream_id: u64,
) -> CoefficientTrajectory {
    CoefficientTrajectory {
        spec: spec.clone(),
        seed,
        stream_id,
        values: sample_range(spec, 0, n_max + 1, seed, stream_id),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::complex_gaussian(),
            DistributionSpec::real_gaussian(),
            DistributionSpec::rademacher(),
            DistributionSpec::uniform_symmetric(3f64.sqrt()).unwrap(),
            DistributionSpec::custom_discrete(vec![
                (Complex64::new(0.0, 0.0), 0.25),
                (Complex64::new(1.0, 1.0), 0.25),
                (Complex64::new(1.0, -1.0), 0.25),
                (Complex64::new(-2.0, 0.0), 0.25),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn rademacher_support() {
        let p = sample_coefficients(&DistributionSpec::rademacher(), 999, 3, 0);
        assert!(p.coeffs().iter().all(|a| (a.re == 1.0 || a.re == -1.0) && a.im == 0.0));
        let plus = p.coeffs().iter().filter(|a| a.re > 0.0).count();
        assert!((400..600).contains(&plus), "{plus}");
    }

    #[test]
    fn sampling_is_deterministic() {
        for spec in all_kinds() {
            let a = sample_coefficients(&spec, 50, 11, 4);
            let b = sample_coefficients(&spec, 50, 11, 4);
            assert_eq!(a, b);
            assert_ne!(a, sample_coefficients(&spec, 50, 12, 4), "{spec}");
        }
    }

    #[test]
    fn prefix_property_every_kind() {
        for spec in all_kinds() {
            let long = sample_trajectory(&spec, 1000, 5, 9);
            let short = sample_trajectory(&spec, 10, 5, 9);
            assert_eq!(short.values(), &long.values()[..11]);
            assert_eq!(short.prefix(10), long.prefix(10));
            let mid = sample_range(&spec, 500, 20, 5, 9);
            assert_eq!(&mid[..], &long.values()[500..520]);
        }
    }

    #[test]
    fn zero_degree_trajectory() {
        let t = sample_trajectory(&DistributionSpec::complex_gaussian(), 0, 1, 1);
        assert_eq!(t.n_max(), 0);
        assert_eq!(t.values().len(), 1);
    }

    #[test]
    fn rejects_bad_discrete_laws() {
        let c1 = Complex64::new(1.0, 0.0);
        assert!(DistributionSpec::custom_discrete(vec![]).is_err());
        assert!(DistributionSpec::custom_discrete(vec![(c1, 0.5)]).is_err());
        assert!(DistributionSpec::custom_discrete(vec![(c1, 1.5), (-c1, -0.5)]).is_err());
        assert!(DistributionSpec::custom_discrete(vec![(Complex64::new(0.0, 0.0), 1.0)]).is_err());
        assert!(DistributionSpec::custom_discrete(vec![(c1, 0.5), (-c1, 0.5 + 1e-13)]).is_ok());
        assert!(DistributionSpec::uniform_symmetric(0.0).is_err());
        assert!(DistributionSpec::uniform_symmetric(f64::INFINITY).is_err());
    }

    #[test]
    fn discrete_atoms_follow_probabilities() {
        let spec = DistributionSpec::custom_discrete(vec![
            (Complex64::new(1.0, 0.0), 0.2),
            (Complex64::new(0.0, 1.0), 0.8),
        ])
        .unwrap();
        let p = sample_coefficients(&spec, 19_999, 1, 0);
        let ones = p.coeffs().iter().filter(|a| a.re == 1.0).count() as f64 / 20_000.0;
        // sd = sqrt(0.16/20000) ≈ 0.0028
        assert!((ones - 0.2).abs() < 0.012, "{ones}");
    }

    #[test]
    fn capability_flags() {
        let cg = DistributionSpec::complex_gaussian().capabilities();
        assert!(cg.sq_density_near_zero && !cg.real_valued);
        let rad = DistributionSpec::rademacher().capabilities();
        assert!(!rad.sq_density_near_zero && !rad.abs_density_near_zero && rad.conjugation_invariant);
        let skew = DistributionSpec::custom_discrete(vec![
            (Complex64::new(1.0, 1.0), 0.5),
            (Complex64::new(-1.0, 0.0), 0.5),
        ])
        .unwrap()
        .capabilities();
        assert!(!skew.conjugation_invariant);
        assert!((skew.second_moment - 1.5).abs() < 1e-15);
        let u = DistributionSpec::uniform_symmetric(3f64.sqrt()).unwrap().capabilities();
        assert!((u.second_moment - 1.0).abs() < 1e-15);
    }

    fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn real_moments_within_three_standard_errors() {
        for spec in [DistributionSpec::real_gaussian(), DistributionSpec::rademacher()] {
            let p = sample_coefficients(&spec, 99_999, 2024, 0);
            let xs: Vec<f64> = p.coeffs().iter().map(|a| a.re).collect();
            let (m1, se1) = mean_and_stderr(&xs);
            assert!(m1.abs() <= 3.0 * se1, "{spec}: mean {m1} se {se1}");
            let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
            let (m2, se2) = mean_and_stderr(&sq);
            // Rademacher squares are exactly 1, stderr 0.
            assert!((m2 - 1.0).abs() <= 3.0 * se2 + 1e-12, "{spec}: E[A²] {m2} se {se2}");
        }
    }

    #[test]
    fn complex_gaussian_modulus_is_unit_exponential() {
        let p = sample_coefficients(&DistributionSpec::complex_gaussian(), 99_999, 77, 3);
        let mut sq: Vec<f64> = p.coeffs().iter().map(|a| a.norm_sqr()).collect();
        let (m, se) = mean_and_stderr(&sq);
        assert!((m - 1.0).abs() <= 3.0 * se, "mean {m} se {se}");
        // Kolmogorov-Smirnov against 1 - e^{-x}; 1% critical value 1.63/√n.
        sq.sort_by(f64::total_cmp);
        let n = sq.len() as f64;
        let d = sq
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = 1.0 - (-x).exp();
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / n.sqrt(), "KS statistic {d}");
        // Re and Im each have variance 1/2 and are uncorrelated.
        let re: Vec<f64> = p.coeffs().iter().map(|a| a.re * a.re).collect();
        let (vr, ser) = mean_and_stderr(&re);
        assert!((vr - 0.5).abs() <= 3.0 * ser, "{vr}");
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let spec = DistributionSpec::real_gaussian();
        let a = sample_coefficients(&spec, 9_999, 8, 0);
        let b = sample_coefficients(&spec, 9_999, 8, 1);
        let xs: Vec<f64> = a.coeffs().iter().map(|c| c.re).collect();
        let ys: Vec<f64> = b.coeffs().iter().map(|c| c.re).collect();
        let (mx, _) = mean_and_stderr(&xs);
        let (my, _) = mean_and_stderr(&ys);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() <= 0.05, "{corr}");
    }
}
