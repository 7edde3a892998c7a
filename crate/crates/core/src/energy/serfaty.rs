use crate::error::Result;
use crate::kernels::{Vec2, VectorGrid};

use super::CoulombFunctional;

/// The two sides of the commutator inequality for one configuration. The
/// right side is `C L (f_N + C m N^{-1/3} + log N / N) + 2 C W m N^{-1/2}`
/// with `L = |grad psi|_inf`, `W = |psi|_{W^{1,inf}}`, `m = 1 + |mu|_inf`;
/// `fitted_c` is the smallest `C` for which it reaches `lhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerfatyReport {
    pub n: usize,
    pub lhs: f64,
    pub f_n: f64,
    pub grad_sup: f64,
    pub w1_inf: f64,
    pub mu_term: f64,
    pub fitted_c: f64,
}

pub fn serfaty_rhs_report(positions: &[Vec2], functional: &CoulombFunctional, psi: &VectorGrid) -> Result<SerfatyReport> {
    let lhs = functional.f_prime_n(positions, psi)?.abs();
    let f_n = functional.f_n(positions)?;
    let jac = psi.jacobian();
    let grad_sup = jac.frobenius().max_abs();
    let w1_inf = psi.max_norm() + grad_sup;
    let m = 1.0 + functional.mu_sup();
    let n = positions.len() as f64;
    // b C^2 + a C = lhs.
    let b = grad_sup * m * n.powf(-1.0 / 3.0);
    let a = grad_sup * (f_n + n.ln() / n) + 2.0 * w1_inf * m * n.powf(-0.5);
    let fitted_c = if lhs == 0.0 {
        0.0
    } else if b > 0.0 {
        (-a + (a * a + 4.0 * b * lhs).sqrt()) / (2.0 * b)
    } else if a > 0.0 {
        lhs / a
    } else {
        f64::INFINITY
    };
    Ok(SerfatyReport { n: positions.len(), lhs, f_n, grad_sup, w1_inf, mu_term: m, fitted_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Density, RadialDensity};
    use crate::euler::fields_from_vorticity_grid;
    use crate::kernels::GridSpec;
    use crate::nbody::sample_monokinetic;

    #[test]
    fn constant_field_and_commutator_agreement() {
        let spec = GridSpec::new(2.0, 128).unwrap();
        let d = RadialDensity::bump(1.0).unwrap();
        let fields = fields_from_vorticity_grid(d.to_grid(spec), 0.0).unwrap();
        let f = CoulombFunctional::new(&fields.omega).unwrap();
        let e = sample_monokinetic(&d, &|_| Vec2::ZERO, 128, 4).unwrap();
        let constant = VectorGrid::from_fn(spec, |_| Vec2::new(1.0, 2.0));
        let r = serfaty_rhs_report(e.positions(), &f, &constant).unwrap();
        assert!(r.lhs < 1e-12);
        let r = serfaty_rhs_report(e.positions(), &f, &fields.u).unwrap();
        let direct = f.f_prime_n(e.positions(), &fields.u).unwrap();
        assert!((r.lhs - direct.abs()).abs() < 1e-12);
        assert!(r.fitted_c.is_finite() && r.fitted_c > 0.0);
    }
}
