//! Two-dimensional incompressible Euler flow on the plane by a Gaussian
//! vortex-blob method, and the derived grid fields.

mod blobs;
mod fields;

pub use blobs::{blob_profile, blob_velocity, init_blobs_from_vorticity, mollified_kernel, step_euler, VortexBlobs};
pub use fields::{fields_from_blobs, fields_from_vorticity_grid, fields_with, grad_u_norms, EulerFields};

use crate::density::GridDensity;
use crate::error::{invalid, Result};
use crate::kernels::{GridSpec, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    pub dt: f64,
    pub t_final: f64,
    pub grid: GridSpec,
    pub blob_count: usize,
    /// Re-seed blobs from the deposited vorticity every this many steps.
    pub remesh_every: Option<usize>,
}

impl Default for EulerParams {
    fn default() -> Self {
        EulerParams {
            dt: 0.05,
            t_final: 1.0,
            grid: GridSpec::default_euler(),
            blob_count: 4096,
            remesh_every: None,
        }
    }
}

impl EulerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("T", format!("must be nonnegative, got {}", self.t_final)));
        }
        if self.blob_count == 0 {
            return Err(invalid("M", "blob count must be at least 1"));
        }
        if self.remesh_every == Some(0) {
            return Err(invalid("remesh_every", "must be at least 1"));
        }
        Ok(())
    }
}

/// Blob snapshots at uniform steps, read back at arbitrary times by linear
/// interpolation of positions.
#[derive(Debug, Clone)]
pub struct EulerTrajectory {
    dt: f64,
    snapshots: Vec<VortexBlobs>,
}

impl EulerTrajectory {
    /// Integrates from `t = 0` through at least `params.t_final`.
    pub fn compute(initial: VortexBlobs, params: &EulerParams) -> Result<Self> {
        params.validate()?;
        let steps = (params.t_final / params.dt).ceil() as usize;
        let mut snapshots = Vec::with_capacity(steps + 1);
        snapshots.push(initial);
        for k in 0..steps {
            let mut next = step_euler(&snapshots[k], params.dt)?;
            if let Some(every) = params.remesh_every {
                if (k + 1) % every == 0 {
                    let omega = GridDensity::new(next.deposit(params.grid)?)?;
                    next = init_blobs_from_vorticity(&omega, params.blob_count, params.grid)?;
                }
            }
            snapshots.push(next);
        }
        Ok(EulerTrajectory { dt: params.dt, snapshots })
    }

    pub fn t_final(&self) -> f64 {
        self.dt * (self.snapshots.len() - 1) as f64
    }

    pub fn snapshots(&self) -> &[VortexBlobs] {
        &self.snapshots
    }

    pub fn blobs_at(&self, t: f64) -> Result<VortexBlobs> {
        if !(t >= 0.0 && t <= self.t_final() + 1e-12) {
            return Err(invalid("t", format!("{t} outside [0, {}]", self.t_final())));
        }
        let s = t / self.dt;
        let k = (s.floor() as usize).min(self.snapshots.len() - 1);
        let frac = s - k as f64;
        if k + 1 >= self.snapshots.len() || frac <= 0.0 {
            return Ok(self.snapshots[k].clone());
        }
        let (a, b) = (&self.snapshots[k], &self.snapshots[k + 1]);
        if a.len() != b.len() {
            // A remesh happened in between; take the nearer snapshot.
            return Ok(if frac < 0.5 { a.clone() } else { b.clone() });
        }
        let positions: Vec<Vec2> = a
            .positions()
            .iter()
            .zip(b.positions())
            .map(|(&p, &q)| p + (q - p) * frac)
            .collect();
        a.with_positions(positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::RadialDensity;

    #[test]
    fn radial_vortex_is_steady() {
        let params = EulerParams { blob_count: 2048, dt: 0.1, ..EulerParams::default() };
        let omega0 = RadialDensity::bump(1.0).unwrap();
        let blobs = init_blobs_from_vorticity(&omega0, params.blob_count, params.grid).unwrap();
        let traj = EulerTrajectory::compute(blobs, &params).unwrap();
        let w0 = traj.snapshots()[0].deposit(params.grid).unwrap();
        let w1 = traj.blobs_at(1.0).unwrap().deposit(params.grid).unwrap();
        let rel = w1.l1_distance(&w0).unwrap() / w0.l1_norm();
        assert!(rel < 0.01, "relative L1 change {rel}");
        assert!((traj.snapshots().last().unwrap().total_circulation() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_hits_snapshots() {
        let params = EulerParams { blob_count: 64, dt: 0.1, t_final: 0.3, ..EulerParams::default() };
        let blobs = init_blobs_from_vorticity(&RadialDensity::bump(0.5).unwrap(), 64, params.grid).unwrap();
        let traj = EulerTrajectory::compute(blobs, &params).unwrap();
        let mid = traj.blobs_at(0.15).unwrap();
        let (a, b) = (&traj.snapshots()[1], &traj.snapshots()[2]);
        for i in 0..mid.len() {
            let avg = (a.positions()[i] + b.positions()[i]) * 0.5;
            assert!((mid.positions()[i] - avg).norm() < 1e-14);
        }
        assert!(traj.blobs_at(0.5).is_err());
        assert!(EulerParams { dt: 0.0, ..params }.validate().is_err());
    }
}
