//! Test functions with exact Fourier pairs, quadrature transform oracles and
//! the error-norm engines.
//!
//! Convention: `𝓕v(ξ) = (2π)^{-d} ∫ e^{iξx} v(x) dx` and
//! `𝓕⁻¹u(x) = ∫ e^{-iξx} u(ξ) dξ`.

pub mod catalog;
pub mod norms;
pub mod transform;

use libm::tgamma as gamma;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use catalog::{Decay, Profile, SmoothnessBound, TestFunction};
pub use norms::{error_norm, NormKind, NormSpec};
pub use transform::{inverse_ft_ball, quadrature_ft, InverseTransform};

/// Area of the unit sphere `∂B_1 ⊂ ℝ^d`: `d π^{d/2} / Γ(d/2 + 1)`.
pub fn surface_constant(dim: usize) -> f64 {
    let d = dim as f64;
    d * std::f64::consts::PI.powf(0.5 * d) / gamma(0.5 * d + 1.0)
}

/// Node counts for the product quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub dim: usize,
    /// Gauss–Legendre nodes per radial segment.
    pub radial_nodes: usize,
    /// Angular resolution (trapezoid count for d = 2, polar nodes for d = 3).
    pub angular_nodes: usize,
    /// Grid points per axis for space-side sup norms.
    pub sup_grid: usize,
    /// Half-width of the cube on which space-side norms are evaluated.
    pub space_box: f64,
}

impl QuadratureSpec {
    pub fn new(
        dim: usize,
        radial_nodes: usize,
        angular_nodes: usize,
        sup_grid: usize,
        space_box: f64,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} not in {{1, 2, 3}}"
            )));
        }
        if radial_nodes < 8 || angular_nodes < 8 || sup_grid < 8 {
            return Err(Error::InvalidParameter(
                "quadrature counts must be at least 8".into(),
            ));
        }
        if !(space_box > 0.0 && space_box.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "space box half-width {space_box} must be positive"
            )));
        }
        Ok(Self {
            dim,
            radial_nodes,
            angular_nodes,
            sup_grid,
            space_box,
        })
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        let sup_grid = match dim {
            1 => 4001,
            2 => 201,
            _ => 41,
        };
        Self::new(dim, 256, 64, sup_grid, 6.0)
    }

    /// The same rule with radial and angular counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
            ..*self
        }
    }
}

/// A function on ℝ^d in frequency space that vanishes outside a ball.
pub trait SpectralField: Sync {
    fn dim(&self) -> usize;

    /// Increasing radii from 0 to the support radius; the field is smooth
    /// between consecutive breaks.
    fn radial_breaks(&self) -> Vec<f64>;

    fn eval(&self, xi: &[f64]) -> Result<Complex64>;

    /// Angular count whose sphere rule hits the field's own directions,
    /// when the field is only defined ray by ray.
    fn preferred_angular(&self) -> Option<usize> {
        None
    }

    fn support_radius(&self) -> f64 {
        self.radial_breaks().last().copied().unwrap_or(0.0)
    }
}

/// The zero field on `B_radius`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField {
    pub dim: usize,
    pub radius: f64,
}

impl SpectralField for ZeroField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn radial_breaks(&self) -> Vec<f64> {
        vec![0.0, self.radius]
    }

    fn eval(&self, _xi: &[f64]) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// Exact `𝓕v` restricted to `B_radius`.
#[derive(Debug, Clone, Copy)]
pub struct RestrictedTransform<'a> {
    pub tf: &'a TestFunction,
    pub radius: f64,
}

impl SpectralField for RestrictedTransform<'_> {
    fn dim(&self) -> usize {
        self.tf.dim()
    }

    fn radial_breaks(&self) -> Vec<f64> {
        vec![0.0, self.radius]
    }

    fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if crate::quad::norm(xi) >= self.radius {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Ok(self.tf.eval_fv(xi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn surface_constants() {
        assert!((surface_constant(1) - 2.0).abs() < 1e-14);
        assert!((surface_constant(2) - 2.0 * PI).abs() < 1e-13);
        assert!((surface_constant(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(4, 64, 64, 64, 6.0).is_err());
        assert!(QuadratureSpec::new(2, 7, 64, 64, 6.0).is_err());
        assert!(QuadratureSpec::new(2, 64, 64, 64, 0.0).is_err());
        let s = QuadratureSpec::default_for(2).unwrap().refined();
        assert_eq!(
            (s.radial_nodes, s.angular_nodes, s.sup_grid),
            (512, 128, 201)
        );
    }
}
