//! Centered Gaussian densities `G_a^d` with covariance `a I`.

use std::f64::consts::PI;

use super::heatpoly::{heat_poly_expansion, Polynomial};
use crate::error::{invalid, Result};
use crate::kernels::{FreeSpaceConvolver, ScalarGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    dimension: usize,
    variance: f64,
}

impl GaussianKernel {
    pub fn new(dimension: usize, variance: f64) -> Result<Self> {
        if dimension != 2 && dimension != 4 {
            return Err(invalid("dimension", format!("must be 2 or 4, got {dimension}")));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid("variance", format!("must be positive, got {variance}")));
        }
        Ok(Self { dimension, variance })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension, "point dimension");
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let a = self.variance;
        (-r2 / (2.0 * a)).exp() / (2.0 * PI * a).powf(self.dimension as f64 / 2.0)
    }

    /// `G_a * G_b = G_{a+b}`.
    pub fn compose(&self, other: &GaussianKernel) -> Result<GaussianKernel> {
        if other.dimension != self.dimension {
            return Err(invalid("dimension", "kernels act on different spaces"));
        }
        GaussianKernel::new(self.dimension, self.variance + other.variance)
    }

    /// Grid convolution of a planar field (dimension 2 only).
    pub fn smooth_grid(&self, conv: &FreeSpaceConvolver, f: &ScalarGrid) -> Result<ScalarGrid> {
        if self.dimension != 2 {
            return Err(invalid("dimension", "grid smoothing is planar"));
        }
        conv.gaussian(f, self.variance)
    }

    /// Exact smoothing of a polynomial in as many variables as the kernel.
    pub fn smooth_polynomial(&self, g: &Polynomial) -> Result<Polynomial> {
        if g.nvars() != self.dimension {
            return Err(invalid("nvars", "polynomial and kernel dimensions differ"));
        }
        heat_poly_expansion(g, 2.0 * self.variance)
    }
}
