use crate::error::{invalid, Error, Result};
use crate::kernels::Vec2;

/// Sign of the gyration term in the velocity equation.
///
/// `Printed` is `xi' = -(xi^perp + F)/eps`, whose guiding centres drift with
/// `-u`. `Euler` flips the gyration, `xi' = -(-xi^perp + F)/eps`, which is the
/// orientation of the velocity operator `-i hbar d + x^perp / 2 eps` and
/// drifts with `+u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Printed,
    Euler,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Printed => 1.0,
            Orientation::Euler => -1.0,
        }
    }
}

/// Field strength and model switch. With `magnetic` off the system is the
/// plain Newton system `xi' = -F`, and `eps` only scales reported energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticParams {
    pub eps: f64,
    pub magnetic: bool,
    pub orientation: Orientation,
}

impl MagneticParams {
    pub fn magnetized(eps: f64) -> Self {
        MagneticParams { eps, magnetic: true, orientation: Orientation::Printed }
    }

    pub fn unmagnetized() -> Self {
        MagneticParams { eps: 1.0, magnetic: false, orientation: Orientation::Printed }
    }

    pub fn with_orientation(self, orientation: Orientation) -> Self {
        MagneticParams { orientation, ..self }
    }

    /// Generator `J = 2 [[0, 1], [-1, 0]]` of the gyration.
    pub fn generator() -> [[f64; 2]; 2] {
        [[0.0, 2.0], [-2.0, 0.0]]
    }

    /// Prefactor of the kinetic energy: `eps` with the field on, 1 without.
    pub fn kinetic_scale(&self) -> f64 {
        if self.magnetic {
            self.eps
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.magnetic && !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(invalid("eps", format!("must be positive, got {}", self.eps)));
        }
        Ok(())
    }
}

/// Positions and velocities of `N` particles.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    positions: Vec<Vec2>,
    velocities: Vec<Vec2>,
}

impl ParticleEnsemble {
    /// Rejects empty ensembles, length mismatches, non-finite entries and
    /// coincident positions.
    pub fn new(positions: Vec<Vec2>, velocities: Vec<Vec2>) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("N", "ensemble needs at least one particle"));
        }
        if positions.len() != velocities.len() {
            return Err(invalid("velocities", "one velocity per particle"));
        }
        if let Some(i) = positions.iter().chain(&velocities).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: format!("particle state entry {i}") });
        }
        let mut order: Vec<usize> = (0..positions.len()).collect();
        order.sort_by(|&a, &b| {
            let (p, q) = (positions[a], positions[b]);
            p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
        });
        for w in order.windows(2) {
            if positions[w[0]] == positions[w[1]] {
                let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::Collision { i, j, distance: 0.0, guard: 0.0 });
            }
        }
        Ok(ParticleEnsemble { positions, velocities })
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

    pub fn velocities(&self) -> &[Vec2] {
        &self.velocities
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<Vec2>, &mut Vec<Vec2>) {
        (&mut self.positions, &mut self.velocities)
    }

    /// `(1/N) sum_i phi(x_i)`, the empirical measure tested against `phi`.
    pub fn empirical_mean(&self, phi: impl Fn(Vec2) -> f64) -> f64 {
        self.positions.iter().map(|&x| phi(x)).sum::<f64>() / self.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().chain(&self.velocities).all(|v| v.is_finite())
    }
}
