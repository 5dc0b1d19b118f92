//! Error norms between a test function and its reconstruction.
//!
//! Sup and L² norms are measured in space on a cube; Sobolev and weighted
//! sup norms in frequency, where the field vanishes outside its ball and
//! only `𝓕v` contributes to the tail.
//!
//! Parallel sums are collected in order and added serially so results do
//! not depend on thread scheduling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{QuadratureSpec, SpectralField, TestFunction};
use crate::error::{Error, Result};
use crate::quad::{LineRule, SphereRule};

/// Tail integrands below this value are treated as zero.
pub const TAIL_TOL: f64 = 1e-18;

/// Largest frequency radius a tail integral may reach.
pub const TAIL_LIMIT: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    SupNorm,
    L2,
    /// `‖u‖_{H^s} = (2π)^{d/2} ‖(1+|ξ|²)^{s/2} 𝓕u‖_{L²}`.
    SobolevHs(f64),
    /// `‖u‖_{W^m} = sup (1+|ξ|²)^{m/2} |𝓕u|`.
    WmSup(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub dim: usize,
}

impl NormSpec {
    pub fn new(kind: NormKind, dim: usize) -> Self {
        Self { kind, dim }
    }

    pub fn name(&self) -> String {
        match self.kind {
            NormKind::SupNorm => "sup".into(),
            NormKind::L2 => "l2".into(),
            NormKind::SobolevHs(s) => format!("h{s}"),
            NormKind::WmSup(m) => format!("w{m}"),
        }
    }
}

/// Reconstruction `x ↦ v̂(x)` compared against `v`.
pub type SpaceFn<'a> = dyn Fn(&[f64]) -> Result<Complex64> + Sync + 'a;

/// Cube points `[-b, b]^d` from a 1-d rule.
fn cube<'r>(rule: &'r LineRule, dim: usize) -> impl ParallelIterator<Item = (Vec<f64>, f64)> + 'r {
    let n = rule.len();
    (0..n.pow(dim as u32)).into_par_iter().map(move |mut idx| {
        let mut x = Vec::with_capacity(dim);
        let mut w = 1.0;
        for _ in 0..dim {
            let i = idx % n;
            idx /= n;
            x.push(rule.nodes[i]);
            w *= rule.weights[i];
        }
        (x, w)
    })
}

fn cube_nodes_per_axis(spec: &QuadratureSpec) -> usize {
    match spec.dim {
        1 => spec.radial_nodes,
        2 => spec.radial_nodes.min(64),
        _ => spec.radial_nodes.min(32),
    }
}

/// Measures `v − v̂` (space-side kinds) or `𝓕v − field` (frequency-side kinds).
pub fn error_norm<F: SpectralField + ?Sized>(
    vhat: &SpaceFn<'_>,
    tf: &TestFunction,
    norm: NormSpec,
    spec: &QuadratureSpec,
    field: &F,
) -> Result<f64> {
    let d = tf.dim();
    if norm.dim != d || spec.dim != d || field.dim() != d {
        return Err(Error::InvalidParameter(
            "norm, quadrature and field dimensions must match the function".into(),
        ));
    }
    let diff = |x: &[f64]| vhat(x).map(|u| (tf.eval_v(x) - u).norm());
    let b = spec.space_box;
    match norm.kind {
        NormKind::SupNorm => {
            let g = spec.sup_grid;
            let axis: Vec<f64> = (0..g)
                .map(|i| -b + 2.0 * b * i as f64 / (g - 1) as f64)
                .collect();
            let rule = LineRule {
                weights: vec![1.0; g],
                nodes: axis,
            };
            cube(&rule, d)
                .map(|(x, _)| diff(&x))
                .try_reduce(|| 0.0, |a, c| Ok(a.max(c)))
        }
        NormKind::L2 => {
            let per_axis = cube_nodes_per_axis(spec);
            let l2 = |nodes: usize| -> Result<(f64, f64)> {
                let rule = LineRule::composite(-b, b, nodes);
                cube(&rule, d)
                    .map(|(x, w)| {
                        let u = vhat(&x)?;
                        let v = tf.eval_v(&x);
                        Ok((w * (v - u).norm_sqr(), w * (v.norm_sqr() + u.norm_sqr())))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(|parts| {
                        parts
                            .into_iter()
                            .fold((0.0, 0.0), |a, c| (a.0 + c.0, a.1 + c.1))
                    })
            };
            let (base, _) = l2(per_axis)?;
            let (refined, scale) = l2(2 * per_axis)?;
            let (base, refined) = (base.sqrt(), refined.sqrt());
            if (base - refined).abs() > 1e-8 * refined.max(1e-4 * scale.sqrt()) {
                return Err(Error::NonConvergent {
                    what: "space-side L2 error".into(),
                    base,
                    refined,
                });
            }
            Ok(refined)
        }
        NormKind::SobolevHs(s) => sobolev_error(tf, s, spec, field),
        NormKind::WmSup(m) => weighted_sup_error(tf, m, spec, field),
    }
}

fn angular_count<F: SpectralField + ?Sized>(field: &F, spec: &QuadratureSpec) -> (usize, usize) {
    match field.preferred_angular() {
        Some(a) => (a, a),
        None => (spec.angular_nodes, 2 * spec.angular_nodes),
    }
}

/// `Σ w (1+t²)^s |𝓕v − F|²` over a polar rule, with the largest single
/// radial contribution (for tail stopping).
fn weighted_l2<G>(radial: &LineRule, sphere: &SphereRule, s: f64, g: G) -> Result<(f64, f64)>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    let d = sphere.dim;
    radial
        .nodes
        .par_iter()
        .zip(&radial.weights)
        .map(|(&t, &wt)| {
            let radial_w = (1.0 + t * t).powf(s) * t.powi(d as i32 - 1);
            let mut x = vec![0.0; d];
            let mut acc = 0.0;
            let mut peak: f64 = 0.0;
            for j in 0..sphere.len() {
                for (xi, c) in x.iter_mut().zip(sphere.direction(j)) {
                    *xi = t * c;
                }
                let val = radial_w * g(&x)?;
                peak = peak.max(val);
                acc += wt * sphere.weights[j] * val;
            }
            Ok((acc, peak))
        })
        .collect::<Result<Vec<_>>>()
        .map(|parts| {
            parts
                .into_iter()
                .fold((0.0, 0.0_f64), |a, b| (a.0 + b.0, a.1.max(b.1)))
        })
}

fn sobolev_error<F: SpectralField + ?Sized>(
    tf: &TestFunction,
    s: f64,
    spec: &QuadratureSpec,
    field: &F,
) -> Result<f64> {
    let d = tf.dim();
    let breaks = field.radial_breaks();
    let big_r = field.support_radius();
    let (a0, a1) = angular_count(field, spec);
    let gap = |x: &[f64]| field.eval(x).map(|f| (tf.eval_fv(x) - f).norm_sqr());
    let inner = |nodes: usize, angular: usize| {
        let radial = LineRule::piecewise(&breaks, nodes);
        weighted_l2(&radial, &SphereRule::new(d, angular), s, gap).map(|r| r.0)
    };
    let base = inner(spec.radial_nodes, a0)?;
    let refined = inner(2 * spec.radial_nodes, a1)?;

    // Exterior: only 𝓕v survives. March unit shells until the integrand is
    // negligible past the spectral mass of v.
    let sphere = SphereRule::new(d, spec.angular_nodes);
    let exact = |x: &[f64]| Ok(tf.eval_fv(x).norm_sqr());
    let past = tf.space_bandwidth() + 1.0;
    let mut tail = 0.0;
    let mut t = big_r;
    loop {
        if t >= TAIL_LIMIT {
            return Err(Error::NonConvergent {
                what: format!("Sobolev tail of {} beyond |ξ| = {TAIL_LIMIT}", tf.name()),
                base: tail,
                refined: tail,
            });
        }
        let shell = LineRule::composite(t, t + 1.0, crate::quad::PANEL_ORDER);
        let (part, peak) = weighted_l2(&shell, &sphere, s, exact)?;
        tail += part;
        t += 1.0;
        if peak < TAIL_TOL && t > past {
            break;
        }
    }
    // The self-check applies to the returned norm, so the exterior part counts.
    if (base - refined).abs() > 1e-8 * (refined + tail).max(1e-24) {
        return Err(Error::NonConvergent {
            what: format!("Sobolev error inside B_{big_r}"),
            base,
            refined,
        });
    }
    Ok((2.0 * PI).powf(0.5 * d as f64) * (refined + tail).sqrt())
}

fn weighted_sup_error<F: SpectralField + ?Sized>(
    tf: &TestFunction,
    m: f64,
    spec: &QuadratureSpec,
    field: &F,
) -> Result<f64> {
    let d = tf.dim();
    let reach = field
        .support_radius()
        .max(tf.fourier_cutoff(m, 1e-8))
        .max(tf.space_bandwidth() + 8.0);
    let (angular, _) = angular_count(field, spec);
    let sphere = SphereRule::new(d, angular);
    let g = spec.sup_grid;
    (0..g)
        .into_par_iter()
        .map(|i| {
            let t = reach * i as f64 / (g - 1) as f64;
            let w = (1.0 + t * t).powf(0.5 * m);
            let mut peak: f64 = 0.0;
            for j in 0..sphere.len() {
                let x: Vec<f64> = sphere.direction(j).iter().map(|c| c * t).collect();
                peak = peak.max(w * (tf.eval_fv(&x) - field.eval(&x)?).norm());
            }
            Ok(peak)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
