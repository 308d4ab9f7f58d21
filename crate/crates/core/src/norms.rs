//! Norms of polynomials on circles `|z| = r`.
//!
//! * `L²`: exact, from the coefficients.
//! * `Lᵖ`, `0 < p < ∞`: rectangle rule on a uniform circle grid, doubled until
//!   the value stabilises. The rule is exact-weight for periodic integrands,
//!   and exact for `p = 2` once the grid has more than `2·deg` points.
//! * sup: certified enclosure. If `|z - t| < ε/n` for the maximiser `t` of a
//!   degree-`n` polynomial `Q` then `|Q(z)| ≥ (1 - ε)‖Q‖∞`, so the maximum over
//!   a grid with angular spacing `ε/n` is within a factor `1 - ε` of the sup.
//!
//! Radii other than one are handled by dilating the coefficients. When that
//! would overflow (large degree on `r > 1`) the dilated coefficients are
//! rescaled by `r^{-n}` and the scale is carried separately as a logarithm.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{evaluate_on_grid_fft, CircleGrid, Polynomial};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
pub const DEFAULT_SUP_EPS: f64 = 0.01;
/// Largest quadrature grid tried before giving up.
pub const MAX_QUAD_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    /// Exponent in `(0, ∞]`; `f64::INFINITY` is the sup norm.
    pub p: f64,
    pub radius: f64,
    pub quad_tol: f64,
    pub sup_eps: f64,
}

impl NormSpec {
    pub fn new(p: f64, radius: f64) -> Result<Self> {
        Self {
            p,
            radius,
            quad_tol: DEFAULT_QUAD_TOL,
            sup_eps: DEFAULT_SUP_EPS,
        }
        .validated()
    }

    pub fn l2(radius: f64) -> Result<Self> {
        Self::new(2.0, radius)
    }

    pub fn sup(radius: f64) -> Result<Self> {
        Self::new(f64::INFINITY, radius)
    }

    pub fn with_sup_eps(mut self, eps: f64) -> Result<Self> {
        self.sup_eps = eps;
        self.validated()
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        self.quad_tol = tol;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.p > 0.0) {
            return bad(format!("norm exponent must be > 0, got {}", self.p));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive and finite, got {}", self.radius));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol.is_finite()) {
            return bad(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        if !(self.sup_eps > 0.0 && self.sup_eps < 1.0) {
            return bad(format!("sup_eps must lie in (0, 1), got {}", self.sup_eps));
        }
        Ok(self)
    }

    pub fn is_sup(&self) -> bool {
        self.p == f64::INFINITY
    }
}

/// Certified bracket `lower ≤ ‖P‖∞ ≤ upper` with `upper = lower / (1 - ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl SupNormEnclosure {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Grid size the reported value was computed on.
    pub points: usize,
    /// False when the point cap was hit before the tolerance was met.
    pub converged: bool,
}

/// A positive number `mantissa · e^{ln_scale}`, used where the plain value
/// could overflow but ratios of two such values are fine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub mantissa: f64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.ln_scale == 0.0 || self.mantissa == 0.0 {
            self.mantissa
        } else {
            (self.mantissa.ln() + self.ln_scale).exp()
        }
    }

    /// `self / other`, zero if `self` is zero.
    pub fn ratio(self, other: Scaled) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        let m = self.mantissa / other.mantissa;
        let ds = self.ln_scale - other.ln_scale;
        if ds == 0.0 {
            m
        } else {
            m * ds.exp()
        }
    }
}

/// Coefficients of `P(r·z)`, possibly divided by `e^{ln_scale}`.
pub(crate) fn dilated_scaled(p: &Polynomial, r: f64) -> (Polynomial, f64) {
    let n = p.formal_degree();
    let ln_r = r.ln();
    // Largest log-magnitude of a dilated coefficient.
    let top = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| a.norm().ln() + k as f64 * ln_r)
        .fold(f64::NEG_INFINITY, f64::max);
    if r == 1.0 || top < 600.0 {
        return (crate::poly::dilate(p, r), 0.0);
    }
    let ln_scale = n as f64 * ln_r;
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| a * ((k as f64 - n as f64) * ln_r).exp())
        .collect();
    (Polynomial::new(coeffs), ln_scale)
}

/// `(Σ |A_k|² r^{2k})^{1/2}`, straight from the coefficients.
pub fn l2_norm(p: &Polynomial, radius: f64) -> f64 {
    let (q, ln_scale) = dilated_scaled(p, radius);
    Scaled {
        mantissa: scaled_euclid(q.coeffs()),
        ln_scale,
    }
    .value()
}

/// Euclidean length without intermediate overflow or underflow.
fn scaled_euclid(v: &[Complex64]) -> f64 {
    let m = v.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|a| (a.norm() / m).powi(2)).sum::<f64>().sqrt()
}

/// `((1/N) Σ |v_j|^p)^{1/p}` computed relative to the largest entry.
fn power_mean(values: &[Complex64], p: f64) -> f64 {
    let m = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let n = values.len() as f64;
    let s: f64 = if p == 2.0 {
        values.iter().map(|v| v.norm_sqr() / (m * m)).sum()
    } else {
        values.iter().map(|v| (v.norm() / m).powf(p)).sum()
    };
    m * (s / n).powf(1.0 / p)
}

pub(crate) fn lp_norm_scaled(p: &Polynomial, spec: &NormSpec) -> Result<(Scaled, usize, bool)> {
    if spec.is_sup() {
        return Err(Error::InvalidArgument("lp_norm needs a finite exponent".into()));
    }
    if p.is_zero() {
        return Ok((Scaled { mantissa: 0.0, ln_scale: 0.0 }, 0, true));
    }
    let (q, ln_scale) = dilated_scaled(p, spec.radius);
    let mut points = (4 * (q.formal_degree() + 1)).max(256);
    let eval = |n: usize| -> f64 {
        let grid = CircleGrid::unit(n).expect("nonzero grid");
        power_mean(&evaluate_on_grid_fft(&q, &grid), spec.p)
    };
    let mut prev = eval(points);
    loop {
        if 2 * points > MAX_QUAD_POINTS {
            return Ok((Scaled { mantissa: prev, ln_scale }, points, false));
        }
        points *= 2;
        let cur = eval(points);
        if (cur - prev).abs() <= spec.quad_tol * cur {
            return Ok((Scaled { mantissa: cur, ln_scale }, points, true));
        }
        prev = cur;
    }
}

/// `((1/2π) ∫ |P(r e^{it})|^p dt)^{1/p}` by the periodic rectangle rule.
///
/// The grid starts at `max(4·(deg+1), 256)` points and doubles until the
/// relative change is at most `spec.quad_tol`, up to [`MAX_QUAD_POINTS`].
pub fn lp_norm(p: &Polynomial, spec: &NormSpec) -> Result<QuadratureResult> {
    let (s, points, converged) = lp_norm_scaled(p, spec)?;
    Ok(QuadratureResult {
        value: s.value(),
        points,
        converged,
    })
}

/// Grid size used for a certified sup norm of a degree-`degree` polynomial:
/// the smallest power of two with angular spacing at most `eps / max(degree, 1)`.
pub fn sup_grid_size(degree: usize, eps: f64) -> usize {
    let n = degree.max(1) as f64;
    let needed = (TAU * n / eps).ceil() as usize;
    needed.max(degree + 1).next_power_of_two()
}

pub(crate) fn sup_norm_scaled(p: &Polynomial, spec: &NormSpec) -> Result<(Scaled, Scaled)> {
    if !spec.is_sup() {
        return Err(Error::InvalidArgument("sup_norm needs p = ∞".into()));
    }
    if p.is_zero() {
        let z = Scaled { mantissa: 0.0, ln_scale: 0.0 };
        return Ok((z, z));
    }
    let (q, ln_scale) = dilated_scaled(p, spec.radius);
    let grid = CircleGrid::unit(sup_grid_size(q.formal_degree(), spec.sup_eps))?;
    let lower = evaluate_on_grid_fft(&q, &grid)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    Ok((
        Scaled { mantissa: lower, ln_scale },
        Scaled {
            mantissa: lower / (1.0 - spec.sup_eps),
            ln_scale,
        },
    ))
}

/// Certified enclosure of `max_{|z| = r} |P(z)|`.
pub fn sup_norm(p: &Polynomial, spec: &NormSpec) -> Result<SupNormEnclosure> {
    let (lo, hi) = sup_norm_scaled(p, spec)?;
    let lower = lo.value();
    Ok(SupNormEnclosure {
        lower,
        upper: if lo.ln_scale == 0.0 { lower / (1.0 - spec.sup_eps) } else { hi.value() },
    })
}
