use std::f64::consts::PI;

use rayon::prelude::*;

use crate::density::Density;
use crate::error::{invalid, Error, Result};
use crate::kernels::{GridSpec, ScalarGrid, Vec2};

/// Mollified Biot-Savart kernel `K(r)(1 - exp(-|r|^2/delta^2))`, equal to
/// `K` convolved with the blob profile. Vanishes at `r = 0`.
#[inline]
pub fn mollified_kernel(r: Vec2, delta: f64) -> Vec2 {
    let r2 = r.norm_sq();
    if r2 == 0.0 {
        return Vec2::ZERO;
    }
    let w = -(-r2 / (delta * delta)).exp_m1() / (2.0 * PI * r2);
    r.perp() * w
}

/// Blob vorticity profile `exp(-|r|^2/delta^2) / (pi delta^2)`.
#[inline]
pub fn blob_profile(r2: f64, delta: f64) -> f64 {
    (-r2 / (delta * delta)).exp() / (PI * delta * delta)
}

/// Gaussian vortex blobs carrying nonnegative circulations of total 1.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexBlobs {
    positions: Vec<Vec2>,
    circulations: Vec<f64>,
    core: f64,
}

impl VortexBlobs {
    pub fn new(positions: Vec<Vec2>, circulations: Vec<f64>, core: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("blobs", "at least one blob is required"));
        }
        if positions.len() != circulations.len() {
            return Err(invalid("circulations", "one circulation per blob"));
        }
        if !(core > 0.0 && core.is_finite()) {
            return Err(invalid("core", format!("must be positive, got {core}")));
        }
        if circulations.iter().any(|&g| !(g >= 0.0)) {
            return Err(invalid("circulations", "must be nonnegative"));
        }
        let total: f64 = circulations.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightsNotNormalized { sum: total });
        }
        Ok(VortexBlobs { positions, circulations, core })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn circulations(&self) -> &[f64] {
        &self.circulations
    }

    pub fn core(&self) -> f64 {
        self.core
    }

    pub fn total_circulation(&self) -> f64 {
        self.circulations.iter().sum()
    }

    /// Same circulations and core, new positions.
    pub fn with_positions(&self, positions: Vec<Vec2>) -> Result<Self> {
        if positions.len() != self.len() {
            return Err(invalid("positions", "blob count changed"));
        }
        Ok(VortexBlobs { positions, circulations: self.circulations.clone(), core: self.core })
    }

    /// Sum of the blob profiles on the grid nodes. Profiles are cut at six
    /// core radii, where they fall below `1e-15` of their peak.
    pub fn deposit(&self, spec: GridSpec) -> Result<ScalarGrid> {
        for (index, &p) in self.positions.iter().enumerate() {
            if !spec.contains(p) {
                return Err(Error::SupportEscaped { index, position: p });
            }
        }
        let n = spec.cells();
        let h = spec.spacing();
        let cut = 6.0 * self.core;
        let mut data = vec![0.0; spec.len()];
        data.par_chunks_mut(n).enumerate().for_each(|(iy, row)| {
            let y = spec.coord(iy);
            for (&p, &g) in self.positions.iter().zip(&self.circulations) {
                let dy = y - p.y;
                if dy.abs() > cut || g == 0.0 {
                    continue;
                }
                let lo = ((p.x - cut + spec.half_width()) / h).ceil().max(0.0) as usize;
                let hi = (((p.x + cut + spec.half_width()) / h).floor() as usize).min(n - 1);
                for (ix, cell) in row.iter_mut().enumerate().take(hi + 1).skip(lo) {
                    let dx = spec.coord(ix) - p.x;
                    *cell += g * blob_profile(dx * dx + dy * dy, self.core);
                }
            }
        });
        ScalarGrid::from_vec(spec, data)
    }
}

/// Lattice blobs approximating `omega0`: roughly `count` lattice points on
/// the bounding box, kept where `omega0 > 0`, with circulations
/// `omega0(x_i) h_b^2` renormalized to 1 and core `2 h_b`.
pub fn init_blobs_from_vorticity(omega0: &dyn Density, count: usize, spec: GridSpec) -> Result<VortexBlobs> {
    if count == 0 {
        return Err(invalid("M", "blob count must be at least 1"));
    }
    let (lo, hi) = omega0.bounding_box();
    let (w, ht) = (hi.x - lo.x, hi.y - lo.y);
    if !(w > 0.0 && ht > 0.0) {
        return Err(invalid("omega0", "bounding box is degenerate"));
    }
    let hb = (w * ht / count as f64).sqrt();
    let nx = ((w / hb).round() as usize).max(1);
    let ny = ((ht / hb).round() as usize).max(1);
    let (sx, sy) = (w / nx as f64, ht / ny as f64);
    let hb = sx.max(sy);
    let mut positions = Vec::new();
    let mut weights = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let p = Vec2::new(lo.x + (i as f64 + 0.5) * sx, lo.y + (j as f64 + 0.5) * sy);
            let v = omega0.value(p);
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativeDensity { point: p });
            }
            if v > 0.0 {
                positions.push(p);
                weights.push(v * sx * sy);
            }
        }
    }
    if positions.is_empty() {
        return Err(invalid("omega0", "no lattice point carries mass"));
    }
    for (index, &p) in positions.iter().enumerate() {
        if !spec.contains(p) {
            return Err(Error::SupportEscaped { index, position: p });
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|g| *g /= total);
    VortexBlobs::new(positions, weights, 2.0 * hb)
}

/// `u(x) = sum_i gamma_i K_delta(x - x_i)` at each point.
pub fn blob_velocity(blobs: &VortexBlobs, points: &[Vec2]) -> Vec<Vec2> {
    let delta = blobs.core;
    points
        .par_iter()
        .map(|&x| {
            let mut acc = Vec2::ZERO;
            for (&y, &g) in blobs.positions.iter().zip(&blobs.circulations) {
                acc += mollified_kernel(x - y, delta) * g;
            }
            acc
        })
        .collect()
}

/// One classical RK4 step of `dx_i/dt = u(x_i)`. Circulations are untouched.
pub fn step_euler(blobs: &VortexBlobs, dt: f64) -> Result<VortexBlobs> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let x0 = &blobs.positions;
    let shifted = |k: &[Vec2], s: f64| -> Vec<Vec2> { x0.iter().zip(k).map(|(&x, &v)| x + v * s).collect() };
    let k1 = blob_velocity(blobs, x0);
    let k2 = blob_velocity(&blobs.with_positions(shifted(&k1, 0.5 * dt))?, &shifted(&k1, 0.5 * dt));
    let k3 = blob_velocity(&blobs.with_positions(shifted(&k2, 0.5 * dt))?, &shifted(&k2, 0.5 * dt));
    let k4 = blob_velocity(&blobs.with_positions(shifted(&k3, dt))?, &shifted(&k3, dt));
    let next: Vec<Vec2> = (0..x0.len())
        .map(|i| x0[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0))
        .collect();
    if let Some(index) = next.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { what: format!("blob {index} position") });
    }
    blobs.with_positions(next)
}
