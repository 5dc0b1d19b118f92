//! Ray sampling of data on `B_r`, the extrapolation operator `C_{R,n}`,
//! the `τ`-schedules and end-to-end reconstruction.
//!
//! Data live on diameters `{tθ_j : |t| ≤ r}` sampled at the Gauss–Chebyshev
//! radii `t_i = r cos φ_i`. On the annulus `r ≤ |ξ| < R` the field is
//! `Σ_{k<n} a_k(θ) T_k(|ξ|/r)`; since `a_k(−θ) = (−1)^k a_k(θ)` one series
//! per diameter, evaluated at the signed coordinate `±|ξ|/r`, covers both
//! half-rays.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chebyshev::{cheb_coeffs, gauss_chebyshev_nodes, ChebSeries};
use crate::error::{Error, Result};
use crate::fourier::{InverseTransform, QuadratureSpec, SpectralField};
use crate::quad::{dot, norm, SphereRule};

/// Closed-form data `ξ ↦ w(ξ)`.
pub type SourceFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Directions per half-circle used by default in d = 2.
pub const DEFAULT_DIRECTIONS_2D: usize = 64;

/// Polar node count of the sphere rule whose upper half gives the d = 3 directions.
pub const DEFAULT_POLAR_3D: usize = 16;

/// Largest admissible `(2R/r)^n`.
pub const GROWTH_CAP: f64 = 1e280;

/// Default unit directions on a half-sphere, with the angular count of the
/// sphere rule that reproduces them (and their antipodes) exactly.
pub fn default_directions(dim: usize) -> Result<(Vec<Vec<f64>>, Option<usize>)> {
    match dim {
        1 => Ok((vec![vec![1.0]], None)),
        2 => {
            let j_count = DEFAULT_DIRECTIONS_2D;
            let dirs = (0..j_count)
                .map(|j| {
                    let phi = std::f64::consts::PI * j as f64 / j_count as f64;
                    vec![phi.cos(), phi.sin()]
                })
                .collect();
            Ok((dirs, Some(2 * j_count)))
        }
        3 => {
            let sphere = SphereRule::new(3, DEFAULT_POLAR_3D);
            let dirs = (0..sphere.len())
                .map(|j| sphere.direction(j).to_vec())
                .filter(|d| d[2] > 0.0)
                .collect();
            Ok((dirs, Some(DEFAULT_POLAR_3D)))
        }
        _ => Err(Error::InvalidParameter(format!(
            "dimension {dim} not in {{1, 2, 3}}"
        ))),
    }
}

/// Data `w` on `B_r` stored along diameters.
#[derive(Clone)]
pub struct RaySampling {
    dim: usize,
    r: f64,
    directions: Vec<Vec<f64>>,
    values: Vec<Vec<Complex64>>,
    nodes_per_ray: usize,
    source: Option<SourceFn>,
    angular_hint: Option<usize>,
}

impl fmt::Debug for RaySampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RaySampling")
            .field("dim", &self.dim)
            .field("r", &self.r)
            .field("directions", &self.directions.len())
            .field("nodes_per_ray", &self.nodes_per_ray)
            .field("exact_source", &self.source.is_some())
            .finish()
    }
}

impl RaySampling {
    /// Raw samples: `values[j][i] = w(t_i θ_j)`.
    pub fn from_values(
        dim: usize,
        r: f64,
        directions: Vec<Vec<f64>>,
        values: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "data radius r = {r} must be positive"
            )));
        }
        if directions.is_empty() || directions.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} directions with {} value rows",
                directions.len(),
                values.len()
            )));
        }
        for theta in &directions {
            if theta.len() != dim || (norm(theta) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "direction {theta:?} is not a unit vector in dimension {dim}"
                )));
            }
        }
        let m = values[0].len();
        if m < 2 {
            return Err(Error::InvalidParameter(
                "at least two nodes per ray required".into(),
            ));
        }
        for row in &values {
            if row.len() != m {
                return Err(Error::InvalidParameter(
                    "rays carry different node counts".into(),
                ));
            }
            if row.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::InvalidParameter(
                    "sample values must be finite".into(),
                ));
            }
        }
        Ok(Self {
            dim,
            r,
            directions,
            values,
            nodes_per_ray: m,
            source: None,
            angular_hint: None,
        })
    }

    /// Samples a closed-form `w` on the default directions and keeps it for
    /// exact evaluation inside `B_r`.
    pub fn sample<F>(dim: usize, r: f64, nodes_per_ray: usize, w: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        let (directions, hint) = default_directions(dim)?;
        Self::sample_along(dim, r, nodes_per_ray, directions, hint, Arc::new(w))
    }

    /// Samples `w` along the given diameters, keeping it as the exact source.
    pub fn sample_along(
        dim: usize,
        r: f64,
        nodes_per_ray: usize,
        directions: Vec<Vec<f64>>,
        angular_hint: Option<usize>,
        w: SourceFn,
    ) -> Result<Self> {
        let s = gauss_chebyshev_nodes(nodes_per_ray);
        let values = directions
            .par_iter()
            .map(|theta| {
                s.iter()
                    .map(|&c| {
                        let xi: Vec<f64> = theta.iter().map(|x| x * r * c).collect();
                        w(&xi)
                    })
                    .collect()
            })
            .collect();
        let mut rs = Self::from_values(dim, r, directions, values)?;
        rs.source = Some(w);
        rs.angular_hint = angular_hint;
        Ok(rs)
    }

    /// Drops the closed-form source so the inner ball uses interpolation.
    pub fn without_source(mut self) -> Self {
        self.source = None;
        self
    }

    /// The same data indexed by `−θ_j`: node order reverses since `t_{M−1−i} = −t_i`.
    pub fn negated(&self) -> Self {
        Self {
            directions: self
                .directions
                .iter()
                .map(|d| d.iter().map(|c| -c).collect())
                .collect(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().rev().copied().collect())
                .collect(),
            angular_hint: None,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn nodes_per_ray(&self) -> usize {
        self.nodes_per_ray
    }

    pub fn values(&self, j: usize) -> &[Complex64] {
        &self.values[j]
    }

    /// Radii `t_i = r cos((2i+1)π/(2M))`.
    pub fn nodes(&self) -> Vec<f64> {
        gauss_chebyshev_nodes(self.nodes_per_ray)
            .into_iter()
            .map(|c| self.r * c)
            .collect()
    }
}

/// `a_0..a_{n−1}` of the diameter through `θ_j`, as a series in `t/r`.
pub fn ray_coeffs(rs: &RaySampling, j: usize, n: usize) -> Result<ChebSeries> {
    cheb_coeffs(&rs.values[j], n)
}

/// Nearest diameter to `ξ` and the signed coordinate `±|ξ|/r` along it.
fn locate(directions: &[Vec<f64>], xi: &[f64], rho: f64, r: f64) -> (usize, f64) {
    let (j, proj) = directions
        .iter()
        .enumerate()
        .map(|(j, d)| (j, dot(d, xi)))
        .fold((0, 0.0_f64), |best, cur| {
            if cur.1.abs() > best.1.abs() {
                cur
            } else {
                best
            }
        });
    (j, rho.copysign(proj) / r)
}

enum Inner {
    Exact(SourceFn),
    Interpolant(Vec<ChebSeries>),
}

/// `C_{R,n} w`: data on `B_r`, Chebyshev sums on the annulus, zero outside `B_R`.
pub struct BallField {
    dim: usize,
    r: f64,
    big_r: f64,
    n: usize,
    directions: Vec<Vec<f64>>,
    annulus: Vec<ChebSeries>,
    inner: Inner,
    angular_hint: Option<usize>,
}

impl fmt::Debug for BallField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BallField")
            .field("dim", &self.dim)
            .field("r", &self.r)
            .field("R", &self.big_r)
            .field("n", &self.n)
            .field("directions", &self.directions.len())
            .finish()
    }
}

impl BallField {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn annulus_series(&self, j: usize) -> &ChebSeries {
        &self.annulus[j]
    }
}

impl SpectralField for BallField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn radial_breaks(&self) -> Vec<f64> {
        if self.big_r > self.r {
            vec![0.0, self.r, self.big_r]
        } else {
            vec![0.0, self.r]
        }
    }

    fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        let rho = norm(xi);
        if rho < self.r {
            return match &self.inner {
                Inner::Exact(w) => Ok(w(xi)),
                Inner::Interpolant(series) => {
                    let (j, s) = locate(&self.directions, xi, rho, self.r);
                    series[j].eval(s)
                }
            };
        }
        if rho >= self.big_r {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (j, s) = locate(&self.directions, xi, rho, self.r);
        self.annulus[j].eval(s)
    }

    fn preferred_angular(&self) -> Option<usize> {
        self.angular_hint
    }
}

/// Builds `C_{R,n} w`.
pub fn extrapolate(rs: &RaySampling, big_r: f64, n: usize) -> Result<BallField> {
    if !(big_r >= rs.r && big_r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "extrapolation radius R = {big_r} below the data radius {}",
            rs.r
        )));
    }
    if n > 0 && n as f64 * (2.0 * big_r / rs.r).ln() >= GROWTH_CAP.ln() {
        return Err(Error::RangeExceeded(format!(
            "(2R/r)^n with R/r = {}, n = {n} exceeds {GROWTH_CAP:e}",
            big_r / rs.r
        )));
    }
    let annulus = (0..rs.directions.len())
        .into_par_iter()
        .map(|j| ray_coeffs(rs, j, n))
        .collect::<Result<Vec<_>>>()?;
    let inner = match &rs.source {
        Some(w) => Inner::Exact(Arc::clone(w)),
        None => Inner::Interpolant(
            (0..rs.directions.len())
                .into_par_iter()
                .map(|j| ray_coeffs(rs, j, rs.nodes_per_ray))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(BallField {
        dim: rs.dim,
        r: rs.r,
        big_r,
        n,
        directions: rs.directions.clone(),
        annulus,
        inner,
        angular_hint: rs.angular_hint,
    })
}

/// `(N, σ, ν, r, δ)` with `0 < δ < N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    big_n: f64,
    sigma: f64,
    nu: f64,
    r: f64,
    delta: f64,
}

impl StabilityParams {
    pub fn new(big_n: f64, sigma: f64, nu: f64, r: f64, delta: f64) -> Result<Self> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {x} must be positive"
                )))
            }
        };
        positive("N", big_n)?;
        positive("sigma", sigma)?;
        positive("r", r)?;
        positive("delta", delta)?;
        if !(nu >= 1.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nu = {nu} must be at least 1"
            )));
        }
        if delta >= big_n {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be below N = {big_n}"
            )));
        }
        Ok(Self {
            big_n,
            sigma,
            nu,
            r,
            delta,
        })
    }

    pub fn big_n(&self) -> f64 {
        self.big_n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.big_n, self.sigma, self.nu, self.r, delta)
    }
}

/// `(τ, α, L_τ(δ), R_τ(δ), n_τ(δ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSchedule {
    pub tau: f64,
    pub alpha: f64,
    pub l: f64,
    pub big_r: f64,
    pub n: usize,
}

/// `α(τ) = 1 − ντ(2 − τ)`; negative past the threshold.
pub fn alpha_of_tau(tau: f64, nu: f64) -> f64 {
    1.0 - nu * tau * (2.0 - tau)
}

/// `τ(α) = 1 − √(1 − (1 − α)/ν)`.
pub fn tau_of_alpha(alpha: f64, nu: f64) -> f64 {
    1.0 - (1.0 - (1.0 - alpha) / nu).max(0.0).sqrt()
}

/// `L = max{1, ½((1−τ) ln(N/δ) / (σ r^ν))^τ}`, `R = rL`,
/// `n = ⌈(2−τ) ln(N/δ) / (ln 2 + ln(2L)/(τν))⌉` for `τ > 0`, else 0.
pub fn schedule(sp: &StabilityParams, tau: f64) -> Result<TauSchedule> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} not in [0, 1]"
        )));
    }
    let log_ratio = (sp.big_n / sp.delta).ln();
    let bracket = (1.0 - tau) * log_ratio / (sp.sigma * sp.r.powf(sp.nu));
    let l = (0.5 * bracket.powf(tau)).max(1.0);
    let n = if tau > 0.0 {
        let denom = std::f64::consts::LN_2 + (2.0 * l).ln() / (tau * sp.nu);
        ((2.0 - tau) * log_ratio / denom).ceil() as usize
    } else {
        0
    };
    Ok(TauSchedule {
        tau,
        alpha: alpha_of_tau(tau, sp.nu),
        l,
        big_r: sp.r * l,
        n,
    })
}

/// `C*_{τ,δ} w = C_{R_τ(δ), n_τ(δ)} w`.
pub fn scheduled_field(
    sp: &StabilityParams,
    tau: f64,
    rs: &RaySampling,
) -> Result<(TauSchedule, BallField)> {
    if (rs.r - sp.r).abs() > 1e-12 * sp.r {
        return Err(Error::InvalidParameter(format!(
            "data radius {} differs from the stability radius {}",
            rs.r, sp.r
        )));
    }
    let sched = schedule(sp, tau)?;
    let field = extrapolate(rs, sched.big_r, sched.n)?;
    Ok((sched, field))
}

/// `(𝓕⁻¹ C*_{τ,δ} w)(x)`.
pub fn reconstruct(
    sp: &StabilityParams,
    tau: f64,
    rs: &RaySampling,
    spec: &QuadratureSpec,
    x: &[f64],
) -> Result<Complex64> {
    let (_, field) = scheduled_field(sp, tau, rs)?;
    InverseTransform::new(&field, spec)?.at(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::eval_t;
    use crate::fourier::TestFunction;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn schedule_examples() {
        let sp = StabilityParams::new(1.0, 1.0, 1.0, 1.0, (-16f64).exp()).unwrap();
        let s = schedule(&sp, 0.5).unwrap();
        assert!((s.l - 2f64.sqrt()).abs() < 1e-14);
        assert!((s.big_r - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(s.n, 9);
        assert!((s.alpha - 0.25).abs() < 1e-15);

        let s0 = schedule(&sp, 0.0).unwrap();
        assert_eq!((s0.l, s0.big_r, s0.n), (1.0, 1.0, 0));

        let sp2 = StabilityParams::new(1.0, 1.0, 2.0, 1.0, (-16f64).exp()).unwrap();
        let s = schedule(&sp2, 0.25).unwrap();
        assert_eq!((s.l, s.big_r, s.n), (1.0, 1.0, 14));
    }

    #[test]
    fn tau_alpha_examples() {
        assert_eq!(tau_of_alpha(1.0, 3.0), 0.0);
        assert_eq!(tau_of_alpha(0.0, 1.0), 1.0);
        assert!((tau_of_alpha(0.25, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(alpha_of_tau(0.0, 2.0), 1.0);
        assert!((alpha_of_tau(0.5, 1.0) - 0.25).abs() < 1e-15);
        assert!(alpha_of_tau(1.0 - 0.5f64.sqrt(), 2.0).abs() < 1e-15);
    }

    #[test]
    fn stability_params_gate() {
        assert!(StabilityParams::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(StabilityParams::new(1.0, 1.0, 0.5, 1.0, 0.1).is_err());
        assert!(StabilityParams::new(1.0, 1.0, 1.0, 1.0, 0.99).is_ok());
    }

    #[test]
    fn ray_coefficients_of_constant_and_t3() {
        let rs = RaySampling::sample(1, 2.0, 32, |_| c(1.0)).unwrap();
        let a = ray_coeffs(&rs, 0, 6).unwrap();
        for (k, v) in a.coeffs().iter().enumerate() {
            assert!((v - c(if k == 0 { 1.0 } else { 0.0 })).norm() < 1e-14);
        }
        let rs = RaySampling::sample(1, 2.0, 32, |x| c(eval_t(3, x[0] / 2.0).unwrap())).unwrap();
        let a = ray_coeffs(&rs, 0, 6).unwrap();
        for (k, v) in a.coeffs().iter().enumerate() {
            assert!((v - c(if k == 3 { 1.0 } else { 0.0 })).norm() < 1e-14);
        }
        assert!(matches!(
            ray_coeffs(&rs, 0, 33),
            Err(Error::InsufficientNodes { .. })
        ));
    }

    #[test]
    fn empty_sum_keeps_data_and_zeroes_annulus() {
        let rs = RaySampling::sample(1, 1.0, 16, |x| c(3.0 + x[0])).unwrap();
        let f = extrapolate(&rs, 2.0, 0).unwrap();
        assert_eq!(f.eval(&[0.5]).unwrap(), c(3.5));
        assert_eq!(f.eval(&[1.5]).unwrap(), c(0.0));
        assert_eq!(f.eval(&[-1.9]).unwrap(), c(0.0));
        assert_eq!(f.eval(&[2.5]).unwrap(), c(0.0));
    }

    #[test]
    fn linear_data_reproduced_on_annulus() {
        let r = 0.5;
        let rs = RaySampling::sample(1, r, 16, move |x| c(x[0] / r))
            .unwrap()
            .without_source();
        let f = extrapolate(&rs, 3.0 * r, 2).unwrap();
        for &x in &[-1.45, -0.9, -0.5, 0.5, 0.77, 1.2, 1.49] {
            assert!((f.eval(&[x]).unwrap() - c(x / r)).norm() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn growth_cap_is_reported() {
        let rs = RaySampling::sample(1, 1.0, 2048, |_| c(1.0)).unwrap();
        assert!(matches!(
            extrapolate(&rs, 4.0, 400),
            Err(Error::RangeExceeded(_))
        ));
        assert!(extrapolate(&rs, 0.5, 4).is_err());
    }

    #[test]
    fn gaussian_extrapolates_to_twice_the_radius() {
        // Exact error of the 20-term truncation on |ξ| ≤ 2, from the Bessel-I
        // series of the coefficients in 40-digit arithmetic.
        let exact_truncation = 1.8911826757784828e-5;
        let g = TestFunction::gaussian(1).unwrap();
        let g2 = g.clone();
        let rs = RaySampling::sample(1, 1.0, 64, move |x| g2.eval_fv(x)).unwrap();
        let f = extrapolate(&rs, 2.0, 20).unwrap();
        let worst = (0..2001)
            .map(|i| -2.0 + 4.0 * (i as f64 + 0.5) / 2001.0)
            .map(|x| (f.eval(&[x]).unwrap() - g.eval_fv(&[x])).norm())
            .fold(0.0, f64::max);
        assert!(
            (worst - exact_truncation).abs() < 0.1 * exact_truncation,
            "{worst}"
        );
    }

    #[test]
    fn reconstruction_with_identity_schedule() {
        let g = TestFunction::gaussian(1).unwrap();
        let spec = QuadratureSpec::default_for(1).unwrap();
        let sp = StabilityParams::new(g.decay().n, g.decay().sigma, 2.0, 8.0, 1e-3).unwrap();
        let g2 = g.clone();
        let rs = RaySampling::sample(1, 8.0, 64, move |x| g2.eval_fv(x)).unwrap();
        let v0 = reconstruct(&sp, 0.0, &rs, &spec, &[0.0]).unwrap();
        assert!((v0 - c(1.0)).norm() < 1e-7, "{v0}");
        let zero = RaySampling::sample(1, 8.0, 64, |_| c(0.0)).unwrap();
        assert_eq!(reconstruct(&sp, 0.0, &zero, &spec, &[1.3]).unwrap(), c(0.0));
    }
}
