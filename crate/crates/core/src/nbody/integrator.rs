use crate::error::{invalid, Result};
use crate::kernels::Vec2;

use super::force::{mean_field_force_with, ForceMethod};
use super::{MagneticParams, Orientation, ParticleEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Half drift, exact gyration under the frozen midpoint force, half drift.
    #[default]
    StrangExactRotation,
    /// Classical RK4 on the full system, for reference runs at small `dt`.
    Rk4Reference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Minimum allowed pair separation.
    pub guard: f64,
    pub scheme: Scheme,
    pub force: ForceMethod,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_final: 1.0,
            guard: 1e-8,
            scheme: Scheme::StrangExactRotation,
            force: ForceMethod::Direct,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid("T", format!("must be nonnegative, got {}", self.t_final)));
        }
        if !(self.guard > 0.0) {
            return Err(invalid("guard", format!("must be positive, got {}", self.guard)));
        }
        Ok(())
    }
}

/// Exact solution over `dt` of `xi' = -(xi^perp + F)/eps` with `F` frozen:
/// rotation by `-dt/eps` about the drift velocity `F^perp`.
pub fn rotation_update(xi: Vec2, force: Vec2, dt: f64, eps: f64) -> Vec2 {
    rotation_update_oriented(xi, force, dt, eps, Orientation::Printed)
}

/// As [`rotation_update`] for either orientation; with sign `s` the drift is
/// `s F^perp` and the rotation angle `-s dt/eps`.
pub fn rotation_update_oriented(xi: Vec2, force: Vec2, dt: f64, eps: f64, orientation: Orientation) -> Vec2 {
    let s = orientation.sign();
    let drift = force.perp() * s;
    drift + (xi - drift).rotate(-s * dt / eps)
}

/// One Strang step. Returns the smallest separation seen by the force sum.
pub fn step_strang(
    ensemble: &mut ParticleEnsemble,
    params: &MagneticParams,
    config: &IntegratorConfig,
) -> Result<f64> {
    let dt = config.dt;
    let (x, xi) = ensemble.parts_mut();
    for (p, v) in x.iter_mut().zip(xi.iter()) {
        *p += *v * (0.5 * dt);
    }
    let eval = mean_field_force_with(x, config.guard, config.force)?;
    if params.magnetic {
        for (v, &f) in xi.iter_mut().zip(&eval.forces) {
            *v = rotation_update_oriented(*v, f, dt, params.eps, params.orientation);
        }
    } else {
        for (v, &f) in xi.iter_mut().zip(&eval.forces) {
            *v -= f * dt;
        }
    }
    for (p, v) in x.iter_mut().zip(xi.iter()) {
        *p += *v * (0.5 * dt);
    }
    Ok(eval.min_separation)
}

fn derivative(
    x: &[Vec2],
    xi: &[Vec2],
    params: &MagneticParams,
    config: &IntegratorConfig,
) -> Result<(Vec<Vec2>, Vec<Vec2>, f64)> {
    let eval = mean_field_force_with(x, config.guard, config.force)?;
    let dxi = if params.magnetic {
        let s = params.orientation.sign();
        xi.iter()
            .zip(&eval.forces)
            .map(|(&v, &f)| -(v.perp() * s + f) / params.eps)
            .collect()
    } else {
        eval.forces.iter().map(|&f| -f).collect()
    };
    Ok((xi.to_vec(), dxi, eval.min_separation))
}

/// One classical RK4 step of the full system.
pub fn step_rk4(ensemble: &mut ParticleEnsemble, params: &MagneticParams, config: &IntegratorConfig) -> Result<f64> {
    let dt = config.dt;
    let (x0, v0) = (ensemble.positions().to_vec(), ensemble.velocities().to_vec());
    let axpy = |a: &[Vec2], b: &[Vec2], s: f64| -> Vec<Vec2> { a.iter().zip(b).map(|(&p, &q)| p + q * s).collect() };
    let (kx1, kv1, m1) = derivative(&x0, &v0, params, config)?;
    let (kx2, kv2, m2) = derivative(&axpy(&x0, &kx1, 0.5 * dt), &axpy(&v0, &kv1, 0.5 * dt), params, config)?;
    let (kx3, kv3, m3) = derivative(&axpy(&x0, &kx2, 0.5 * dt), &axpy(&v0, &kv2, 0.5 * dt), params, config)?;
    let (kx4, kv4, m4) = derivative(&axpy(&x0, &kx3, dt), &axpy(&v0, &kv3, dt), params, config)?;
    let (x, xi) = ensemble.parts_mut();
    for i in 0..x.len() {
        x[i] = x0[i] + (kx1[i] + kx2[i] * 2.0 + kx3[i] * 2.0 + kx4[i]) * (dt / 6.0);
        xi[i] = v0[i] + (kv1[i] + kv2[i] * 2.0 + kv3[i] * 2.0 + kv4[i]) * (dt / 6.0);
    }
    Ok(m1.min(m2).min(m3).min(m4))
}

pub fn step(ensemble: &mut ParticleEnsemble, params: &MagneticParams, config: &IntegratorConfig) -> Result<f64> {
    match config.scheme {
        Scheme::StrangExactRotation => step_strang(ensemble, params, config),
        Scheme::Rk4Reference => step_rk4(ensemble, params, config),
    }
}
