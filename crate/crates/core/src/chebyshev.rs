//! Chebyshev polynomials of the first kind, Gauss–Chebyshev coefficient
//! quadrature, Clenshaw evaluation and the truncation-error bound for
//! functions holomorphic in a Bernstein-type ellipse.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::Compensated;

/// Coefficient type of a Chebyshev sum: `f64` or `Complex64`.
pub trait Scalar:
    Copy + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn is_finite(self) -> bool;
    fn magnitude(self) -> f64;
    /// Real and imaginary parts.
    fn parts(self) -> (f64, f64);
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

/// `T_k(t)` by the three-term recurrence.
pub fn eval_t(k: usize, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t = {t} is not finite")));
    }
    let (mut prev, mut cur) = (1.0, t);
    if k == 0 {
        return Ok(prev);
    }
    for _ in 1..k {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(Error::RangeExceeded(format!("T_{k}({t})")));
        }
    }
    Ok(cur)
}

/// Angles `φ_i = (2i+1)π/(2M)`, `i = 0..M`, of the M-point Gauss–Chebyshev rule.
pub fn gauss_chebyshev_angles(m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| (2 * i + 1) as f64 * PI / (2 * m) as f64)
        .collect()
}

/// `π − PI`: the part of π lost when rounding to `f64`.
const PI_TAIL: f64 = 1.2246467991473532e-16;

/// `cos(πa)` for `a ∈ [0, 2)`, reduced exactly to `[0, 1/4]` and corrected
/// for the rounding of π. Plain `cos(PI * a)` carries a bias proportional
/// to `a`, which shifts every node the same way and leaves a systematic
/// error in the coefficients that `T_k` amplifies outside `[-1, 1]`.
pub fn cos_pi(a: f64) -> f64 {
    debug_assert!((0.0..2.0).contains(&a));
    let a = if a > 1.0 { 2.0 - a } else { a };
    let (a, sign) = if a > 0.5 { (1.0 - a, -1.0) } else { (a, 1.0) };
    let value = if a <= 0.25 {
        let x = PI * a;
        x.cos() - x.sin() * PI_TAIL * a
    } else {
        let b = 0.5 - a;
        let y = PI * b;
        y.sin() + y.cos() * PI_TAIL * b
    };
    sign * value
}

/// Nodes `cos φ_i` of the M-point Gauss–Chebyshev rule (descending from near 1).
pub fn gauss_chebyshev_nodes(m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| cos_pi((2 * i + 1) as f64 / (2 * m) as f64))
        .collect()
}

/// Node count used when the caller has no preference.
pub fn default_node_count(n: usize) -> usize {
    (4 * n).max(64)
}

/// A truncated Chebyshev sum `Σ_{k<n} b_k T_k(t)`. The empty series is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries<T = Complex64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> ChebSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coefficient {k} is not finite"
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// First `n` terms (all of them if `n ≥ len`).
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            coeffs: self.coeffs[..n.min(self.coeffs.len())].to_vec(),
        }
    }

    /// Clenshaw backward recurrence.
    pub fn eval(&self, t: f64) -> Result<T> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t = {t} is not finite")));
        }
        let n = self.coeffs.len();
        match n {
            0 => return Ok(T::zero()),
            1 => return Ok(self.coeffs[0]),
            _ => {}
        }
        let two_t = 2.0 * t;
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &c in self.coeffs[1..].iter().rev() {
            let b = b1 * two_t - b2 + c;
            b2 = b1;
            b1 = b;
        }
        let value = b1 * t - b2 + self.coeffs[0];
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::RangeExceeded(format!(
                "Chebyshev sum of {n} terms at t = {t}"
            )))
        }
    }
}

/// Coefficients `b_0..b_{n-1}` of `f` from its values at the M Gauss–Chebyshev
/// nodes (`samples[i] = f(cos φ_i)`):
///
/// `b_k = (2 - [k = 0]) / M · Σ_i f(cos φ_i) cos(k φ_i)`.
pub fn cheb_coeffs<T: Scalar>(samples: &[T], n: usize) -> Result<ChebSeries<T>> {
    let m = samples.len();
    if m < n {
        return Err(Error::InsufficientNodes {
            requested: n,
            nodes: m,
        });
    }
    // k φ_i = π · k(2i+1) / (2M); reducing k(2i+1) mod 4M in integers keeps
    // the cosine argument in [0, 2π) without rounding growth in k. The sums
    // are compensated: partial sums of f cos(kφ) grow like M/k, and plain
    // accumulation error would be amplified by T_k outside [-1, 1].
    let period = 4 * m as u64;
    let coeffs = (0..n)
        .map(|k| {
            let scale = if k == 0 { 1.0 } else { 2.0 } / m as f64;
            let (mut re, mut im) = (Compensated::default(), Compensated::default());
            for (i, &f) in samples.iter().enumerate() {
                let j = (k as u64 * (2 * i as u64 + 1)) % period;
                let (a, b) = (f * cos_pi(j as f64 / (2 * m) as f64)).parts();
                re.add(a);
                im.add(b);
            }
            T::from_parts(re.value(), im.value()) * scale
        })
        .collect();
    ChebSeries::new(coeffs)
}

/// Parameters of the Chebyshev truncation bound: ellipse parameter `rho > 2`,
/// evaluation half-width `rho_prime ∈ [1, rho/2)` and sup bound `m_rho` of
/// the function on the ellipse `{cos z : |Im z| < ln rho}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    rho: f64,
    rho_prime: f64,
    m_rho: f64,
}

impl EllipseParams {
    pub fn new(rho: f64, rho_prime: f64, m_rho: f64) -> Result<Self> {
        if !(rho > 2.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rho = {rho} must exceed 2"
            )));
        }
        if !(rho_prime >= 1.0 && rho_prime < rho / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "rho' = {rho_prime} must lie in [1, rho/2)"
            )));
        }
        if !(m_rho > 0.0 && m_rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "M_rho = {m_rho} must be positive"
            )));
        }
        Ok(Self {
            rho,
            rho_prime,
            m_rho,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_prime(&self) -> f64 {
        self.rho_prime
    }

    pub fn m_rho(&self) -> f64 {
        self.m_rho
    }
}

/// `2 M_ρ (1 − 2ρ′/ρ)^{−1} (2ρ′/ρ)^n`: sup error on `[−ρ′, ρ′]` of the
/// n-term Chebyshev truncation of a function bounded by `M_ρ` on the ellipse.
pub fn lemma71_bound(ep: &EllipseParams, n: usize) -> f64 {
    let q = 2.0 * ep.rho_prime / ep.rho;
    2.0 * ep.m_rho / (1.0 - q) * q.powi(n as i32)
}
