//! Dense complex polynomials and evaluation on circles.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// `P(z) = Σ A_k z^k` stored densely by power.
///
/// The formal degree is `coeffs.len() - 1` and is authoritative even when the
/// leading coefficient happens to be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients `A_0..A_n`. An empty vector is
    /// treated as the zero constant.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        debug_assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c · z^n`
    pub fn monomial(n: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Self { coeffs }
    }

    pub fn zero(formal_degree: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); formal_degree + 1],
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn formal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// The first `n + 1` coefficients, i.e. the partial sum `P_n`.
    pub fn truncate(&self, n: usize) -> Polynomial {
        let end = (n + 1).min(self.coeffs.len());
        Self::new(self.coeffs[..end].to_vec())
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Self::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    /// Schoolbook product. Only used for building test polynomials such as
    /// `p · q*`, so quadratic cost is fine.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Coefficient map `A_k → A_k ω^k`, i.e. `z ↦ P(ωz)`.
    pub fn rotate(&self, omega: Complex64) -> Polynomial {
        let mut w = Complex64::new(1.0, 0.0);
        Self::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let v = a * w;
                    w *= omega;
                    v
                })
                .collect(),
        )
    }

    /// Writes one coefficient per line as `re im`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.coeffs {
            let _ = writeln!(out, "{:e} {:e}", c.re, c.im);
        }
        out
    }

    /// Parses the format written by [`Polynomial::to_text`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| -> Result<f64> {
                let tok = parts.next().ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: format!("missing {what} part"),
                })?;
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid number {tok:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: "coefficients must be finite".into(),
                    });
                }
                Ok(v)
            };
            let re = next("real")?;
            let im = next("imaginary")?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected exactly two numbers".into(),
                });
            }
            coeffs.push(Complex64::new(re, im));
        }
        if coeffs.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no coefficients".into(),
            });
        }
        Ok(Self::new(coeffs))
    }
}

/// `N` equally spaced points `radius · exp(2πij/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    radius: f64,
    size: usize,
}

impl CircleGrid {
    pub fn new(radius: f64, size: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid radius must be positive, got {radius}"
            )));
        }
        if size == 0 {
            return Err(Error::InvalidArgument("grid size must be at least 1".into()));
        }
        Ok(Self { radius, size })
    }

    pub fn unit(size: usize) -> Result<Self> {
        Self::new(1.0, size)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Point `j`, computed from its angle rather than by repeated
    /// multiplication.
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius, TAU * j as f64 / self.size as f64)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.size).map(|j| self.point(j)).collect()
    }
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    if p.formal_degree() == 0 {
        return Polynomial::zero(0);
    }
    Polynomial::new(
        p.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * k as f64)
            .collect(),
    )
}

/// Horner evaluation.
pub fn evaluate(p: &Polynomial, z: Complex64) -> Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

/// `Σ A_k r^k z^k`. Powers are taken directly so that large degrees on
/// sub-unit radii underflow to zero instead of accumulating error.
pub fn dilate(p: &Polynomial, r: f64) -> Polynomial {
    assert!(r > 0.0, "dilation radius must be positive");
    if r == 1.0 {
        return p.clone();
    }
    Polynomial::new(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(k, a)| a * r.powi(k as i32))
            .collect(),
    )
}

/// `q_k = conj(A_{n-k})`, so that `q(z) = z^n · conj(p(1/conj z))`.
pub fn conjugate_reciprocal(p: &Polynomial) -> Polynomial {
    Polynomial::new(p.coeffs().iter().rev().map(|a| a.conj()).collect())
}

/// Values of `p` at every grid point.
///
/// Uses a length-`N` inverse DFT of the dilated coefficients when the grid has
/// at least `deg + 1` points and Horner otherwise. Both paths agree up to
/// rounding; Horner is the reference.
pub fn evaluate_on_grid(p: &Polynomial, grid: &CircleGrid) -> Vec<Complex64> {
    if grid.size() > p.formal_degree() {
        evaluate_on_grid_fft(p, grid)
    } else {
        evaluate_on_grid_horner(p, grid)
    }
}

pub fn evaluate_on_grid_horner(p: &Polynomial, grid: &CircleGrid) -> Vec<Complex64> {
    (0..grid.size()).map(|j| evaluate(p, grid.point(j))).collect()
}

/// Transform path. Panics if the grid is smaller than `deg + 1`.
pub fn evaluate_on_grid_fft(p: &Polynomial, grid: &CircleGrid) -> Vec<Complex64> {
    let n = grid.size();
    assert!(n > p.formal_degree(), "grid too small for transform evaluation");
    let mut buf = dilate(p, grid.radius()).into_coeffs();
    buf.resize(n, Complex64::new(0.0, 0.0));
    inverse_fft(n).process(&mut buf);
    buf
}

fn inverse_fft(n: usize) -> Arc<dyn Fft<f64>> {
    thread_local! {
        static PLANNER: std::cell::RefCell<FftPlanner<f64>> = std::cell::RefCell::new(FftPlanner::new());
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn derivative_examples() {
        let p = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(derivative(&p), Polynomial::from_real(&[1.0, 2.0]));
        let d = derivative(&Polynomial::from_real(&[5.0]));
        assert_eq!(d.formal_degree(), 0);
        assert!(d.is_zero());
        for n in 1..8 {
            let d = derivative(&Polynomial::monomial(n, c(1.0, 0.0)));
            assert_eq!(d, Polynomial::monomial(n - 1, c(n as f64, 0.0)));
        }
    }

    #[test]
    fn evaluate_examples() {
        let p = Polynomial::from_real(&[1.0, 1.0]);
        assert_eq!(evaluate(&p, c(1.0, 0.0)), c(2.0, 0.0));
        let q = Polynomial::new(vec![c(3.0, -2.0), c(1.0, 1.0), c(0.5, 0.0)]);
        assert_eq!(evaluate(&q, c(0.0, 0.0)), c(3.0, -2.0));
    }

    #[test]
    fn grid_of_z_is_roots_of_unity() {
        let p = Polynomial::monomial(1, c(1.0, 0.0));
        let grid = CircleGrid::unit(4).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for vals in [evaluate_on_grid_fft(&p, &grid), evaluate_on_grid_horner(&p, &grid)] {
            for (v, e) in vals.iter().zip(expect) {
                assert!((v - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_on_any_grid() {
        let p = Polynomial::constant(c(2.5, -1.0));
        for size in [1, 3, 16] {
            let grid = CircleGrid::new(0.7, size).unwrap();
            assert!(evaluate_on_grid(&p, &grid).iter().all(|v| close(*v, c(2.5, -1.0), 1e-15)));
        }
    }

    #[test]
    fn small_grid_falls_back_to_horner() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let grid = CircleGrid::unit(2).unwrap();
        let vals = evaluate_on_grid(&p, &grid);
        assert!(close(vals[0], c(10.0, 0.0), 1e-14));
        assert!(close(vals[1], c(-2.0, 0.0), 1e-14));
    }

    #[test]
    fn dilate_examples() {
        let p = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(dilate(&p, 1.0), p);
        assert_eq!(
            dilate(&Polynomial::monomial(2, c(1.0, 0.0)), 0.5),
            Polynomial::from_real(&[0.0, 0.0, 0.25])
        );
    }

    #[test]
    fn conjugate_reciprocal_examples() {
        assert_eq!(
            conjugate_reciprocal(&Polynomial::from_real(&[1.0, 2.0])),
            Polynomial::from_real(&[2.0, 1.0])
        );
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(conjugate_reciprocal(&p), p);
        let q = Polynomial::new(vec![c(1.0, 2.0), c(0.0, -3.0)]);
        assert_eq!(
            conjugate_reciprocal(&q).coeffs(),
            &[c(0.0, 3.0), c(1.0, -2.0)]
        );
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(CircleGrid::new(0.0, 4).is_err());
        assert!(CircleGrid::new(1.0, 0).is_err());
        assert!(CircleGrid::new(f64::NAN, 4).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let p = Polynomial::new(vec![c(1.5, -2.0), c(1e-300, 3.25e10)]);
        assert_eq!(Polynomial::from_text(&p.to_text()).unwrap(), p);
        let parsed = Polynomial::from_text("# header\n1 0\n\n2.5E-3 -1e2\n").unwrap();
        assert_eq!(parsed.coeffs(), &[c(1.0, 0.0), c(2.5e-3, -100.0)]);
        assert!(matches!(
            Polynomial::from_text("1 0\n1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Polynomial::from_text("1 x\n").is_err());
        assert!(Polynomial::from_text("1 2 3\n").is_err());
        assert!(Polynomial::from_text("nan 0\n").is_err());
        assert!(Polynomial::from_text("").is_err());
    }

    #[test]
    fn truncate_and_rotate() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.truncate(1), Polynomial::from_real(&[1.0, 2.0]));
        assert_eq!(p.truncate(10), p);
        let r = p.rotate(c(0.0, 1.0));
        assert_eq!(r.coeffs(), &[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
    }
}
