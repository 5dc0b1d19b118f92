//! Composite Gauss–Legendre rules and polar product rules on balls.
//!
//! Everything that integrates over ℝ^d in this crate goes through
//! [`PolarRule`]: a radial composite Gauss–Legendre rule (with the
//! `t^{d-1}` Jacobian folded into the weights) times a rule on the unit
//! sphere. Radial breakpoints let callers put panel edges on the
//! discontinuities of piecewise fields.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 16;

fn reference_panel() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(PANEL_ORDER).expect("panel order >= 2");
        let mut pairs: Vec<(f64, f64)> =
            rule.nodes().copied().zip(rule.weights().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    })
}

/// A one-dimensional rule: `Σ w_i f(x_i) ≈ ∫_a^b f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// Composite Gauss–Legendre on `[a, b]` with at least `min_nodes` nodes,
    /// rounded up to whole panels of [`PANEL_ORDER`].
    pub fn composite(a: f64, b: f64, min_nodes: usize) -> Self {
        let panels = min_nodes.div_ceil(PANEL_ORDER).max(1);
        Self::panels(a, b, panels)
    }

    pub fn panels(a: f64, b: f64, panels: usize) -> Self {
        let (xs, ws) = reference_panel();
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for (x, w) in xs.iter().zip(ws) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    /// Concatenation of composite rules on consecutive intervals
    /// `[breaks[0], breaks[1]], [breaks[1], breaks[2]], …`.
    pub fn piecewise(breaks: &[f64], nodes_per_segment: usize) -> Self {
        let mut rule = Self {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
        for pair in breaks.windows(2) {
            if pair[1] > pair[0] {
                let seg = Self::composite(pair[0], pair[1], nodes_per_segment);
                rule.nodes.extend(seg.nodes);
                rule.weights.extend(seg.weights);
            }
        }
        rule
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A rule on the unit sphere S^{d-1}: `Σ w_j g(θ_j) ≈ ∫_{S^{d-1}} g`.
///
/// * d = 1: the two points ±1 with unit weight.
/// * d = 2: `count` equispaced angles starting at 0 (trapezoid rule).
/// * d = 3: Gauss–Legendre in cos θ (`count` nodes) times `2·count`
///   equispaced azimuths.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub directions: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, count: usize) -> Self {
        let mut directions = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                directions.extend([1.0, -1.0]);
                weights.extend([1.0, 1.0]);
            }
            2 => {
                let count = count.max(1);
                for j in 0..count {
                    let phi = 2.0 * PI * j as f64 / count as f64;
                    directions.extend([phi.cos(), phi.sin()]);
                    weights.push(2.0 * PI / count as f64);
                }
            }
            3 => {
                let polar = LineRule::composite(-1.0, 1.0, count.max(1));
                let azimuths = 2 * polar.len();
                for (&z, &wz) in polar.nodes.iter().zip(&polar.weights) {
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    for j in 0..azimuths {
                        let phi = 2.0 * PI * j as f64 / azimuths as f64;
                        directions.extend([s * phi.cos(), s * phi.sin(), z]);
                        weights.push(wz * 2.0 * PI / azimuths as f64);
                    }
                }
            }
            _ => panic!("unsupported dimension {dim}"),
        }
        Self {
            dim,
            directions,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn direction(&self, j: usize) -> &[f64] {
        &self.directions[j * self.dim..(j + 1) * self.dim]
    }
}

/// Product rule on a ball `B_T ⊂ ℝ^d` in polar coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRule {
    pub dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl PolarRule {
    /// `breaks` are increasing radii starting at 0; the last one is the
    /// ball radius. Each radial segment gets its own composite rule.
    pub fn ball(dim: usize, breaks: &[f64], radial_nodes: usize, angular_nodes: usize) -> Self {
        let radial = LineRule::piecewise(breaks, radial_nodes);
        let sphere = SphereRule::new(dim, angular_nodes);
        Self::product(&radial, &sphere)
    }

    pub fn product(radial: &LineRule, sphere: &SphereRule) -> Self {
        let dim = sphere.dim;
        let mut points = Vec::with_capacity(radial.len() * sphere.len() * dim);
        let mut weights = Vec::with_capacity(radial.len() * sphere.len());
        for (&t, &wt) in radial.nodes.iter().zip(&radial.weights) {
            let jac = wt * t.powi(dim as i32 - 1);
            for j in 0..sphere.len() {
                points.extend(sphere.direction(j).iter().map(|c| c * t));
                weights.push(jac * sphere.weights[j]);
            }
        }
        Self {
            dim,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Euclidean norm of a point.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_integrates_polynomials_and_exponentials() {
        let rule = LineRule::composite(0.0, 2.0, 48);
        assert_eq!(rule.len(), 48);
        let cubic = rule.integrate(|x| x * x * x);
        assert!((cubic - 4.0).abs() < 1e-13);
        let e = rule.integrate(f64::exp);
        assert!((e - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn piecewise_skips_empty_segments() {
        let rule = LineRule::piecewise(&[0.0, 1.0, 1.0, 3.0], 16);
        assert_eq!(rule.len(), 32);
        assert!((rule.integrate(|_| 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ball_volumes() {
        for (dim, vol) in [(1, 2.0), (2, PI), (3, 4.0 * PI / 3.0)] {
            let rule = PolarRule::ball(dim, &[0.0, 0.5, 1.0], 16, 16);
            let v: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((v - vol).abs() < 1e-12, "d={dim}: {v}");
        }
    }

    #[test]
    fn sphere_rule_integrates_quadratic_moment() {
        // ∫_{S^2} z^2 = 4π/3
        let s = SphereRule::new(3, 8);
        let m: f64 = (0..s.len())
            .map(|j| s.weights[j] * s.direction(j)[2].powi(2))
            .sum();
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
