//! Velocity from vorticity and the explicit sup bound.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::convolve::FreeSpaceConvolver;
use super::potential::biot_savart_kernel;
use super::{ScalarGrid, Vec2};
use crate::error::{invalid, Error, Result};
use crate::euler::mollified_kernel;

/// Where the vorticity lives.
#[derive(Debug, Clone, Copy)]
pub enum VorticitySource<'a> {
    /// Grid density; evaluated by free-space convolution and bilinear
    /// interpolation.
    Grid(&'a ScalarGrid),
    /// Gaussian-mollified blobs with core radius `core`.
    Blobs {
        positions: &'a [Vec2],
        weights: &'a [f64],
        core: f64,
    },
    /// Unmollified point vortices.
    Points {
        positions: &'a [Vec2],
        weights: &'a [f64],
    },
}

/// `u = K * omega` at each of `points`.
pub fn velocity_from_vorticity(source: VorticitySource<'_>, points: &[Vec2]) -> Result<Vec<Vec2>> {
    match source {
        VorticitySource::Grid(omega) => {
            let u = FreeSpaceConvolver::new(*omega.spec()).biot_savart(omega)?;
            points.iter().map(|&p| u.interpolate(p)).collect()
        }
        VorticitySource::Blobs { positions, weights, core } => {
            check_weights(positions, weights)?;
            if !(core > 0.0) {
                return Err(invalid("core", "blob core radius must be positive"));
            }
            Ok(points
                .par_iter()
                .map(|&x| {
                    positions
                        .iter()
                        .zip(weights)
                        .fold(Vec2::ZERO, |acc, (&y, &w)| acc + mollified_kernel(x - y, core) * w)
                })
                .collect())
        }
        VorticitySource::Points { positions, weights } => {
            check_weights(positions, weights)?;
            points
                .par_iter()
                .map(|&x| {
                    let mut acc = Vec2::ZERO;
                    for (k, (&y, &w)) in positions.iter().zip(weights).enumerate() {
                        let k_xy = biot_savart_kernel(x - y)
                            .map_err(|_| Error::CoincidentPointVortex { index: k })?;
                        acc += k_xy * w;
                    }
                    Ok(acc)
                })
                .collect()
        }
    }
}

fn check_weights(positions: &[Vec2], weights: &[f64]) -> Result<()> {
    if positions.len() != weights.len() {
        return Err(invalid(
            "weights",
            format!("{} weights for {} positions", weights.len(), positions.len()),
        ));
    }
    Ok(())
}

/// `2 |omega|_inf + |omega|_1 / 2pi`, an explicit bound on `|K * omega|`.
pub fn velocity_sup_bound(omega: &ScalarGrid) -> f64 {
    2.0 * omega.max_abs() + omega.l1_norm() / (2.0 * PI)
}
