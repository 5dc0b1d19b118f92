//! Closed-form right-hand sides of the stability estimates and the
//! `β` thresholds of the logarithmic rates.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::extrapolation::{alpha_of_tau, StabilityParams, TauSchedule};
use crate::fourier::surface_constant;
use crate::quad::LineRule;

/// Nodes of the radial rule in [`thm32_rhs`]; the self-check doubles it.
pub const RADIAL_RULE_NODES: usize = 256;

/// Smoothness data `‖v‖_{W^m} ≤ γ₁`, `‖v‖_{H^m} ≤ γ₂` and the Sobolev index `s`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Smoothness {
    pub m: f64,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub s: Option<f64>,
}

/// Everything the bound evaluators read. Plain numbers so that the
/// `λ`-family bounds can be evaluated without a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundInputs {
    pub dim: usize,
    pub big_n: f64,
    pub nu: f64,
    pub r: f64,
    pub delta: f64,
    pub tau: f64,
    pub alpha: f64,
    pub l: f64,
    pub big_r: f64,
    pub smooth: Smoothness,
    pub lam: Option<f64>,
    pub q_lam: Option<f64>,
}

impl BoundInputs {
    pub fn from_schedule(sp: &StabilityParams, sched: &TauSchedule, dim: usize) -> Self {
        Self {
            dim,
            big_n: sp.big_n(),
            nu: sp.nu(),
            r: sp.r(),
            delta: sp.delta(),
            tau: sched.tau,
            alpha: sched.alpha,
            l: sched.l,
            big_r: sched.big_r,
            ..Self::default()
        }
    }

    /// Inputs for the fixed-`λ` bounds: data radius `r`, extrapolation
    /// radius `R`, noise `δ` and `Q_v(λ)`.
    pub fn at_lambda(r: f64, big_r: f64, delta: f64, lam: f64, q_lam: f64) -> Self {
        Self {
            dim: 1,
            r,
            big_r,
            delta,
            l: big_r / r,
            lam: Some(lam),
            q_lam: Some(q_lam),
            ..Self::default()
        }
    }

    pub fn with_smoothness(mut self, smooth: Smoothness) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn with_lambda(mut self, lam: f64, q_lam: f64) -> Self {
        self.lam = Some(lam);
        self.q_lam = Some(q_lam);
        self
    }

    fn lambda_pair(&self) -> Result<(f64, f64)> {
        match (self.lam, self.q_lam) {
            (Some(l), Some(q)) if l > 0.0 && q > 0.0 => Ok((l, q)),
            _ => Err(Error::InvalidParameter(
                "λ and Q_v(λ) must be set and positive".into(),
            )),
        }
    }

    /// `r ≤ R ≤ λ/2`.
    fn check_radii(&self, lam: f64) -> Result<()> {
        if self.big_r < self.r {
            return Err(Error::HypothesisViolated(format!(
                "R = {} is below r = {}",
                self.big_r, self.r
            )));
        }
        if self.big_r > 0.5 * lam {
            return Err(Error::HypothesisViolated(format!(
                "R = {} exceeds λ/2 = {}",
                self.big_r,
                0.5 * lam
            )));
        }
        Ok(())
    }
}

/// `2(2R/r)^n δ + 4 Q_v(λ) (R/λ)^n`.
pub fn lemma51_rhs(bi: &BoundInputs, n: usize) -> Result<f64> {
    let (lam, q) = bi.lambda_pair()?;
    bi.check_radii(lam)?;
    let n = n as i32;
    Ok(2.0 * (2.0 * bi.big_r / bi.r).powi(n) * bi.delta + 4.0 * q * (bi.big_r / lam).powi(n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm52 {
    pub bound: f64,
    pub n_star: usize,
    pub tau_lambda: f64,
}

/// `(8R/r)(Q_v(λ)/δ)^{τ(λ)} δ` with `τ(λ) = ln(2R/r)/ln(2λ/r)` and
/// `n* = ⌈ln(Q_v(λ)/δ)/ln(2λ/r)⌉`.
pub fn thm52_rhs(bi: &BoundInputs) -> Result<Thm52> {
    let (lam, q) = bi.lambda_pair()?;
    bi.check_radii(lam)?;
    if !(bi.delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {} must be positive",
            bi.delta
        )));
    }
    if bi.delta >= q {
        return Err(Error::DeltaTooLarge { delta: bi.delta, q });
    }
    let log_base = (2.0 * lam / bi.r).ln();
    let tau_lambda = (2.0 * bi.big_r / bi.r).ln() / log_base;
    let ratio = q / bi.delta;
    Ok(Thm52 {
        bound: 8.0 * bi.big_r / bi.r * ratio.powf(tau_lambda) * bi.delta,
        n_star: (ratio.ln() / log_base).ceil() as usize,
        tau_lambda,
    })
}

/// `8 L_τ(δ) N^{1−α} δ^α` with `α = 1 − ντ(2−τ)`.
pub fn cor54_rhs(bi: &BoundInputs) -> Result<f64> {
    if !(bi.tau >= 0.0 && bi.tau <= 1.0 / bi.nu) {
        return Err(Error::HypothesisViolated(format!(
            "tau = {} outside [0, 1/nu] with nu = {}",
            bi.tau, bi.nu
        )));
    }
    let alpha = alpha_of_tau(bi.tau, bi.nu);
    Ok(8.0 * bi.l * bi.big_n.powf(1.0 - alpha) * bi.delta.powf(alpha))
}

/// `(8c(d)/d) N^{1−α} r^d L^{d+1} δ^α + (c(d)/(m−d)) γ₁ r^{d−m} L^{d−m}`.
pub fn thm31_rhs(bi: &BoundInputs) -> Result<f64> {
    let d = bi.dim as f64;
    let m = bi.smooth.m;
    if !(m > d) {
        return Err(Error::HypothesisViolated(format!(
            "m = {m} must exceed d = {d}"
        )));
    }
    let gamma1 = bi
        .smooth
        .gamma1
        .ok_or_else(|| Error::InvalidParameter("W^m bound γ₁ not set".into()))?;
    let c = surface_constant(bi.dim);
    let hoelder = 8.0 * c / d
        * bi.big_n.powf(1.0 - bi.alpha)
        * bi.r.powf(d)
        * bi.l.powf(d + 1.0)
        * bi.delta.powf(bi.alpha);
    let tail = c / (m - d) * gamma1 * bi.r.powf(d - m) * bi.l.powf(d - m);
    Ok(hoelder + tail)
}

/// `∫_0^{T} (1+t²)^s t^{d−1} dt` by Gauss–Legendre, checked against twice the nodes.
fn sobolev_radial_integral(dim: usize, s: f64, upper: f64) -> Result<f64> {
    let f = |t: f64| (1.0 + t * t).powf(s) * t.powi(dim as i32 - 1);
    let base = LineRule::composite(0.0, upper, RADIAL_RULE_NODES).integrate(f);
    let refined = LineRule::composite(0.0, upper, 2 * RADIAL_RULE_NODES).integrate(f);
    if (base - refined).abs() > 1e-10 * refined.abs() {
        return Err(Error::NonConvergent {
            what: format!("radial Sobolev weight integral up to {upper}"),
            base,
            refined,
        });
    }
    Ok(refined)
}

/// `8(2π)^{d/2} N^{1−α} (c(d) ∫_0^{rL}(1+t²)^s t^{d−1} dt)^{1/2} L δ^α + γ₂ r^{s−m} L^{s−m}`.
pub fn thm32_rhs(bi: &BoundInputs) -> Result<f64> {
    let d = bi.dim as f64;
    let m = bi.smooth.m;
    let s = bi.smooth.s.unwrap_or(0.0);
    if !(m >= -0.5 * d) {
        return Err(Error::HypothesisViolated(format!("m = {m} below -d/2")));
    }
    if !(s < m) {
        return Err(Error::HypothesisViolated(format!(
            "s = {s} must be below m = {m}"
        )));
    }
    let gamma2 = bi
        .smooth
        .gamma2
        .ok_or_else(|| Error::InvalidParameter("H^m bound γ₂ not set".into()))?;
    let radial = sobolev_radial_integral(bi.dim, s, bi.r * bi.l)?;
    let hoelder = 8.0
        * (2.0 * PI).powf(0.5 * d)
        * bi.big_n.powf(1.0 - bi.alpha)
        * (surface_constant(bi.dim) * radial).sqrt()
        * bi.l
        * bi.delta.powf(bi.alpha);
    let tail = gamma2 * bi.r.powf(s - m) * bi.l.powf(s - m);
    Ok(hoelder + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaKind {
    /// Sup-norm rate, measured against `d`.
    Beta1,
    /// Sobolev rate, measured against `s`.
    Beta2,
}

/// `(1 − √(1 − 1/ν))(m − d)` or `(1 − √(1 − 1/ν))(m − s)`.
pub fn beta_max(nu: f64, m: f64, d_or_s: f64, which: BetaKind) -> Result<f64> {
    if !(nu >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "nu = {nu} must be at least 1"
        )));
    }
    if !(m > d_or_s) {
        let what = match which {
            BetaKind::Beta1 => "d",
            BetaKind::Beta2 => "s",
        };
        return Err(Error::HypothesisViolated(format!(
            "m = {m} must exceed {what} = {d_or_s}"
        )));
    }
    Ok((1.0 - (1.0 - 1.0 / nu).sqrt()) * (m - d_or_s))
}
