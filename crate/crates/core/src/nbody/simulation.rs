use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernels::coulomb_potential_unchecked;

use super::force::{min_separation, pair_potential_sum};
use super::integrator::{step, IntegratorConfig};
use super::{MagneticParams, ParticleEnsemble};

/// `h = (k/2N) sum |xi_i|^2 + (1/2N^2) sum_{i != j} V(x_i - x_j)`, with
/// `k = eps` in the magnetized system and `k = 1` without the field.
pub fn hamiltonian(ensemble: &ParticleEnsemble, params: &MagneticParams) -> Result<f64> {
    let n = ensemble.len() as f64;
    let kinetic: f64 = ensemble.velocities().iter().map(|v| v.norm_sq()).sum();
    let pairs = pair_potential_sum(ensemble.positions())?;
    Ok(params.kinetic_scale() * kinetic / (2.0 * n) + pairs / (2.0 * n * n))
}

/// Interaction part of the Hamiltonian, summed over unordered pairs.
pub fn interaction_energy(ensemble: &ParticleEnsemble) -> Result<f64> {
    let x = ensemble.positions();
    let n = x.len() as f64;
    let rows: Vec<Result<f64>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in (i + 1)..x.len() {
                let r2 = (x[i] - x[j]).norm_sq();
                if r2 == 0.0 {
                    return Err(Error::Collision { i, j, distance: 0.0, guard: 0.0 });
                }
                s += coulomb_potential_unchecked(r2);
            }
            Ok(s)
        })
        .collect();
    let mut s = 0.0;
    for r in rows {
        s += r?;
    }
    Ok(s / (n * n))
}

/// Called at `t = 0` and after every `stride` steps.
pub trait Observer {
    fn observe(&mut self, t: f64, ensemble: &ParticleEnsemble, min_separation: f64) -> Result<()>;
}

impl<F: FnMut(f64, &ParticleEnsemble, f64) -> Result<()>> Observer for F {
    fn observe(&mut self, t: f64, ensemble: &ParticleEnsemble, min_separation: f64) -> Result<()> {
        self(t, ensemble, min_separation)
    }
}

/// Records `(t, h)`.
#[derive(Debug, Clone)]
pub struct EnergyObserver {
    pub params: MagneticParams,
    pub samples: Vec<(f64, f64)>,
}

impl EnergyObserver {
    pub fn new(params: MagneticParams) -> Self {
        EnergyObserver { params, samples: Vec::new() }
    }

    /// `max_t |h(t) - h(0)| / (|h(0)| + 1)`.
    pub fn relative_drift(&self) -> f64 {
        let Some(&(_, h0)) = self.samples.first() else { return 0.0 };
        self.samples.iter().map(|&(_, h)| (h - h0).abs()).fold(0.0, f64::max) / (h0.abs() + 1.0)
    }
}

impl Observer for EnergyObserver {
    fn observe(&mut self, t: f64, ensemble: &ParticleEnsemble, _: f64) -> Result<()> {
        self.samples.push((t, hamiltonian(ensemble, &self.params)?));
        Ok(())
    }
}

/// Records `(t, min pair separation)`.
#[derive(Debug, Clone, Default)]
pub struct SeparationObserver {
    pub samples: Vec<(f64, f64)>,
}

impl Observer for SeparationObserver {
    fn observe(&mut self, t: f64, _: &ParticleEnsemble, min_separation: f64) -> Result<()> {
        self.samples.push((t, min_separation));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// Stopped by an error; observers keep what they saw before it.
    Aborted(Error),
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub ensemble: ParticleEnsemble,
    pub t: f64,
    pub steps: usize,
    /// Smallest separation seen over the whole run.
    pub min_separation: f64,
    pub termination: Termination,
}

/// Integrates to `config.t_final`, observing every `stride` steps. Collisions
/// and non-finite states end the run early with [`Termination::Aborted`].
pub fn run_simulation(
    ensemble: ParticleEnsemble,
    params: &MagneticParams,
    config: &IntegratorConfig,
    stride: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<SimulationOutcome> {
    if stride == 0 {
        return Err(invalid("stride", "observer stride must be at least 1"));
    }
    params.validate()?;
    config.validate()?;
    let steps = (config.t_final / config.dt).round() as usize;
    let mut state = ensemble;
    let mut run_min = min_separation(state.positions()).0;
    let outcome = |state: ParticleEnsemble, t: f64, k: usize, m: f64, termination| SimulationOutcome {
        ensemble: state,
        t,
        steps: k,
        min_separation: m,
        termination,
    };
    if state.len() > 1 && run_min < config.guard {
        let (d, i, j) = min_separation(state.positions());
        let e = Error::Collision { i, j, distance: d, guard: config.guard };
        return Ok(outcome(state, 0.0, 0, run_min, Termination::Aborted(e)));
    }
    for o in observers.iter_mut() {
        o.observe(0.0, &state, run_min)?;
    }
    for k in 1..=steps {
        let t = k as f64 * config.dt;
        match step(&mut state, params, config) {
            Ok(m) => run_min = run_min.min(m),
            Err(e) => return Ok(outcome(state, t - config.dt, k - 1, run_min, Termination::Aborted(e))),
        }
        if !state.is_finite() {
            let e = Error::NonFinite { what: format!("particle state at step {k}") };
            return Ok(outcome(state, t, k, run_min, Termination::Aborted(e)));
        }
        if k % stride == 0 || k == steps {
            let m = min_separation(state.positions()).0;
            run_min = run_min.min(m);
            for o in observers.iter_mut() {
                o.observe(t, &state, m)?;
            }
        }
    }
    let t = steps as f64 * config.dt;
    Ok(outcome(state, t, steps, run_min, Termination::Completed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Vec2;
    use crate::nbody::{rotation_update, Scheme};
    use std::f64::consts::PI;

    #[test]
    fn pair_at_unit_distance_has_zero_energy() {
        let e = ParticleEnsemble::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)], vec![Vec2::ZERO; 2]).unwrap();
        assert_eq!(hamiltonian(&e, &MagneticParams::magnetized(0.1)).unwrap(), 0.0);
    }

    #[test]
    fn interaction_is_rotation_invariant() {
        let x = vec![Vec2::new(0.1, 0.2), Vec2::new(-0.4, 0.3), Vec2::new(0.5, -0.6)];
        let r: Vec<Vec2> = x.iter().map(|p| p.rotate(1.1)).collect();
        let a = ParticleEnsemble::new(x, vec![Vec2::ZERO; 3]).unwrap();
        let b = ParticleEnsemble::new(r, vec![Vec2::ZERO; 3]).unwrap();
        let p = MagneticParams::magnetized(0.1);
        assert!((hamiltonian(&a, &p).unwrap() - hamiltonian(&b, &p).unwrap()).abs() < 1e-15);
        assert!((2.0 * interaction_energy(&a).unwrap() - 2.0 * hamiltonian(&a, &p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn resting_particle_without_field_stays() {
        let e = ParticleEnsemble::new(vec![Vec2::new(0.2, 0.1)], vec![Vec2::ZERO]).unwrap();
        let cfg = IntegratorConfig { dt: 0.01, t_final: 0.5, ..Default::default() };
        let out = run_simulation(e.clone(), &MagneticParams::unmagnetized(), &cfg, 5, &mut []).unwrap();
        assert_eq!(out.ensemble, e);
        assert_eq!(out.termination, Termination::Completed);
    }

    #[test]
    fn zero_stride_is_rejected() {
        let e = ParticleEnsemble::new(vec![Vec2::ZERO], vec![Vec2::ZERO]).unwrap();
        let cfg = IntegratorConfig::default();
        assert!(run_simulation(e, &MagneticParams::magnetized(0.1), &cfg, 0, &mut []).is_err());
    }

    #[test]
    fn single_particle_circles() {
        // Strang circle radius: (dt/2)|xi| cot(dt/2eps), which tends to eps|xi|.
        let eps = 0.05;
        let xi0 = Vec2::new(0.7, 0.0);
        let e = ParticleEnsemble::new(vec![Vec2::ZERO], vec![xi0]).unwrap();
        let cfg = IntegratorConfig { dt: 1e-4, t_final: 2.0 * PI * eps, ..Default::default() };
        let mut pts = Vec::new();
        let mut rec = |_: f64, s: &ParticleEnsemble, _: f64| {
            pts.push(s.positions()[0]);
            Ok(())
        };
        let out = run_simulation(e, &MagneticParams::magnetized(eps), &cfg, 1, &mut [&mut rec]).unwrap();
        assert_eq!(out.termination, Termination::Completed);
        // Gyration centre of the printed orientation: x - eps xi^perp.
        let centre = -xi0.perp() * eps;
        let radius = eps * xi0.norm();
        for p in &pts {
            assert!(((*p - centre).norm() - radius).abs() < 1e-6);
        }
        assert!((rotation_update(xi0, Vec2::ZERO, 2.0 * PI * eps, eps) - xi0).norm() < 1e-14);
    }

    #[test]
    fn collision_aborts_with_partial_record() {
        // Two particles pushed head-on against the repulsion.
        let e = ParticleEnsemble::new(
            vec![Vec2::new(-0.1, 0.0), Vec2::new(0.1, 0.0)],
            vec![Vec2::new(50.0, 0.0), Vec2::new(-50.0, 0.0)],
        )
        .unwrap();
        let cfg = IntegratorConfig { dt: 1e-4, t_final: 0.01, guard: 0.05, scheme: Scheme::StrangExactRotation, ..Default::default() };
        let mut sep = SeparationObserver::default();
        let out = run_simulation(e, &MagneticParams::unmagnetized(), &cfg, 1, &mut [&mut sep]).unwrap();
        assert!(matches!(out.termination, Termination::Aborted(Error::Collision { i: 0, j: 1, .. })));
        assert!(!sep.samples.is_empty());
        assert!(sep.samples.iter().all(|&(_, d)| d >= 0.05));
    }
}
