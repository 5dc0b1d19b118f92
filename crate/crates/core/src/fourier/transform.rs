//! Quadrature transforms: the forward oracle for catalog functions and the
//! inverse transform of fields supported in a ball.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{QuadratureSpec, SpectralField, TestFunction};
use crate::error::{Error, Result};
use crate::quad::{dot, norm, Compensated, LineRule, SphereRule};

/// Relative tolerance of the doubling self-check.
pub const DOUBLING_TOL: f64 = 1e-8;

/// Absolute floor of the self-check, as a fraction of `Σ|w f|`.
const ROUNDOFF_FLOOR: f64 = 1e-4;

fn check(
    what: impl FnOnce() -> String,
    base: Complex64,
    refined: Complex64,
    scale: f64,
) -> Result<Complex64> {
    let tol = DOUBLING_TOL * refined.norm().max(ROUNDOFF_FLOOR * scale);
    if (base - refined).norm() > tol {
        Err(Error::NonConvergent {
            what: what(),
            base: base.norm(),
            refined: refined.norm(),
        })
    } else {
        Ok(refined)
    }
}

/// Trapezoid count (d = 2) or polar node count (d = 3) that resolves
/// `e^{i a·θ}` on the sphere for `|a| ≤ reach`.
fn angular_for(dim: usize, reach: f64, floor: usize) -> usize {
    let need = match dim {
        2 => (1.25 * reach).ceil() as usize + 32,
        3 => (0.75 * reach).ceil() as usize + 16,
        _ => 0,
    };
    need.max(floor)
}

/// `Σ_{t, θ} w_t w_θ t^{d-1} f(tθ)` together with `Σ |…|`, parallel over
/// radii and summed in node order. The sums are compensated: oscillatory
/// integrands cancel down to a tiny fraction of `Σ |…|`.
fn polar_sum<F>(radial: &LineRule, sphere: &SphereRule, f: F) -> (Complex64, f64)
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let d = sphere.dim;
    let parts: Vec<(Complex64, f64)> = radial
        .nodes
        .par_iter()
        .zip(&radial.weights)
        .map(|(&t, &wt)| {
            let jac = wt * t.powi(d as i32 - 1);
            let mut x = vec![0.0; d];
            let (mut re, mut im) = (Compensated::default(), Compensated::default());
            let mut mag = 0.0;
            for j in 0..sphere.len() {
                for (xi, c) in x.iter_mut().zip(sphere.direction(j)) {
                    *xi = t * c;
                }
                let v = f(&x) * (jac * sphere.weights[j]);
                re.add(v.re);
                im.add(v.im);
                mag += v.norm();
            }
            (Complex64::new(re.value(), im.value()), mag)
        })
        .collect();
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    let mut mag = 0.0;
    for (v, m) in parts {
        re.add(v.re);
        im.add(v.im);
        mag += m;
    }
    (Complex64::new(re.value(), im.value()), mag)
}

/// Numerical `𝓕v(ξ)` by polar product quadrature of `(2π)^{-d} ∫ e^{iξx} v(x) dx`
/// over the ball outside which `v` is negligible, checked against the rule
/// with doubled node counts.
pub fn quadrature_ft(tf: &TestFunction, xi: &[f64], spec: &QuadratureSpec) -> Result<Complex64> {
    let d = tf.dim();
    if xi.len() != d || spec.dim != d {
        return Err(Error::InvalidParameter(format!(
            "point of length {} for a {d}-dimensional function",
            xi.len()
        )));
    }
    let cutoff = tf.space_cutoff();
    let reach = cutoff * (norm(xi) + tf.space_bandwidth());
    let integrand = |x: &[f64]| tf.eval_v(x) * Complex64::from_polar(1.0, dot(xi, x));
    let scale = (2.0 * PI).powi(-(d as i32));
    let run = |s: &QuadratureSpec| {
        let radial = LineRule::composite(0.0, cutoff, s.radial_nodes);
        let sphere = SphereRule::new(d, angular_for(d, reach, s.angular_nodes));
        let (sum, mag) = polar_sum(&radial, &sphere, integrand);
        (sum * scale, mag * scale)
    };
    let (base, _) = run(spec);
    let (refined, mag) = run(&spec.refined());
    check(
        || format!("forward transform of {} at {xi:?}", tf.name()),
        base,
        refined,
        mag,
    )
}

/// Precomputed samples of a field for repeated `∫_{B_R} e^{-iξx} F(ξ) dξ`.
pub struct InverseTransform {
    dim: usize,
    base: Vec<(Vec<f64>, Complex64)>,
    refined: Vec<(Vec<f64>, Complex64)>,
    scale: f64,
}

impl InverseTransform {
    pub fn new<F: SpectralField + ?Sized>(field: &F, spec: &QuadratureSpec) -> Result<Self> {
        let d = field.dim();
        if spec.dim != d {
            return Err(Error::InvalidParameter(format!(
                "quadrature for d = {} applied to a {d}-dimensional field",
                spec.dim
            )));
        }
        let breaks = field.radial_breaks();
        let support = field.support_radius();
        let reach = support * spec.space_box * (d as f64).sqrt();
        let sample = |radial_nodes: usize, angular: usize| -> Result<Vec<(Vec<f64>, Complex64)>> {
            let radial = LineRule::piecewise(&breaks, radial_nodes);
            let sphere = SphereRule::new(d, angular);
            let mut points = Vec::with_capacity(radial.len() * sphere.len());
            for (&t, &wt) in radial.nodes.iter().zip(&radial.weights) {
                let jac = wt * t.powi(d as i32 - 1);
                for j in 0..sphere.len() {
                    let xi: Vec<f64> = sphere.direction(j).iter().map(|c| c * t).collect();
                    points.push((xi, jac * sphere.weights[j]));
                }
            }
            points
                .into_par_iter()
                .map(|(xi, w)| field.eval(&xi).map(|f| (xi, f * w)))
                .collect()
        };
        let (a0, a1) = match field.preferred_angular() {
            Some(count) => (count, count),
            None => {
                let a = angular_for(d, reach, spec.angular_nodes);
                (a, 2 * a)
            }
        };
        let base = sample(spec.radial_nodes, a0)?;
        let refined = sample(2 * spec.radial_nodes, a1)?;
        let scale = refined.iter().map(|(_, f)| f.norm()).sum();
        Ok(Self {
            dim: d,
            base,
            refined,
            scale,
        })
    }

    fn sum(samples: &[(Vec<f64>, Complex64)], x: &[f64]) -> Complex64 {
        samples
            .iter()
            .map(|(xi, f)| f * Complex64::from_polar(1.0, -dot(xi, x)))
            .sum()
    }

    /// `∫_{B_R} e^{-iξx} F(ξ) dξ`.
    pub fn at(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "point of length {} for a {}-dimensional field",
                x.len(),
                self.dim
            )));
        }
        let base = Self::sum(&self.base, x);
        let refined = Self::sum(&self.refined, x);
        check(
            || format!("inverse transform at {x:?}"),
            base,
            refined,
            self.scale,
        )
    }
}

/// One-off `∫_{B_R} e^{-iξx} F(ξ) dξ`; use [`InverseTransform`] for many points.
pub fn inverse_ft_ball<F: SpectralField + ?Sized>(
    field: &F,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    InverseTransform::new(field, spec)?.at(x)
}
