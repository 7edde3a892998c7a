use crate::error::{invalid, Result};
use crate::euler::EulerFields;
use crate::kernels::{FreeSpaceConvolver, Vec2};
use crate::nbody::{interaction_energy, ParticleEnsemble};

use super::CoulombFunctional;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `E1 + E2`.
    pub e: f64,
    /// `(eps/2N) sum |xi_i - u(x_i)|^2`, plus `(eps/2N) sum |x_i|^2` with
    /// confinement.
    pub e1: f64,
    /// Interaction part against `mu = omega + eps frak_u`.
    pub e2: f64,
    /// `E2` with `mu` replaced by `omega`.
    pub e_star: f64,
    pub f_n: f64,
    pub f_prime_n: f64,
    /// `f_N + (1 + |mu|_inf)/N + log N / N`.
    pub slack: f64,
    pub confinement: bool,
}

/// Modulated energy of an ensemble against Euler fields sharing `eps`.
///
/// `E2` is summed here over unordered pairs and independently of `f_N`,
/// which sums over ordered pairs; the two agree as `E2 = f_N / 2`.
pub fn classical_modulated_energy(
    ensemble: &ParticleEnsemble,
    fields: &EulerFields,
    include_confinement: bool,
) -> Result<EnergyBreakdown> {
    let conv = FreeSpaceConvolver::new(*fields.spec());
    classical_modulated_energy_with(&conv, ensemble, fields, include_confinement)
}

pub fn classical_modulated_energy_with(
    conv: &FreeSpaceConvolver,
    ensemble: &ParticleEnsemble,
    fields: &EulerFields,
    include_confinement: bool,
) -> Result<EnergyBreakdown> {
    let eps = fields.eps;
    if !(eps >= 0.0) {
        return Err(invalid("eps", "fields carry a negative eps"));
    }
    let x = ensemble.positions();
    let n = x.len() as f64;

    let mut kinetic = 0.0;
    for (&p, &v) in x.iter().zip(ensemble.velocities()) {
        kinetic += (v - fields.u.interpolate(p)?).norm_sq();
    }
    let mut e1 = eps * kinetic / (2.0 * n);
    if include_confinement {
        e1 += eps * x.iter().map(|p: &Vec2| p.norm_sq()).sum::<f64>() / (2.0 * n);
    }

    let pairs = interaction_energy(ensemble)?;
    let e2_against = |v_mu: &crate::kernels::ScalarGrid, mu: &crate::kernels::ScalarGrid| -> Result<f64> {
        let mut cross = 0.0;
        for &p in x {
            cross += v_mu.interpolate(p)?;
        }
        Ok(pairs + 0.5 * v_mu.dot(mu)? - cross / n)
    };
    let v_mu = conv.potential(&fields.mu)?;
    let e2 = e2_against(&v_mu, &fields.mu)?;
    let v_omega = conv.potential(&fields.omega)?;
    let e_star = e2_against(&v_omega, &fields.omega)?;

    let functional = CoulombFunctional::with_convolver(FreeSpaceConvolver::new(*fields.spec()), &fields.mu)?;
    let f_n = functional.f_n(x)?;
    let slack = f_n + (1.0 + functional.mu_sup()) / n + n.ln() / n;
    let f_prime_n = functional.f_prime_n(x, &fields.u)?;

    Ok(EnergyBreakdown { e: e1 + e2, e1, e2, e_star, f_n, f_prime_n, slack, confinement: include_confinement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Density, RadialDensity};
    use crate::euler::fields_from_vorticity_grid;
    use crate::kernels::GridSpec;
    use crate::nbody::sample_monokinetic;

    #[test]
    fn monokinetic_data_has_no_kinetic_excess() {
        let spec = GridSpec::new(2.0, 128).unwrap();
        let omega0 = RadialDensity::bump(1.0).unwrap();
        let fields = fields_from_vorticity_grid(omega0.to_grid(spec), 0.1).unwrap();
        let u = fields.u.clone();
        let e = sample_monokinetic(&omega0, &|p| u.interpolate(p).unwrap(), 200, 3).unwrap();
        let b = classical_modulated_energy(&e, &fields, false).unwrap();
        assert_eq!(b.e1, 0.0);
        assert!((b.e2 - b.f_n / 2.0).abs() < 1e-10);
        assert_eq!(b.e, b.e1 + b.e2);
        let c = classical_modulated_energy(&e, &fields, true).unwrap();
        assert!(c.e1 > 0.0 && c.confinement);
    }
}
