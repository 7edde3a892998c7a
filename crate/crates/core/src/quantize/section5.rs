//! Initial modulated energy of the rotating-frame symbol
//! `nu = omega(q) delta(p + q^perp / 2 eps - theta(q))`.

use super::identities::kinetic_closed_form;
use super::toeplitz::Atom;
use super::coherent::PhasePoint;
use crate::density::{Density, RadialDensity};
use crate::error::{invalid, Error, Result};
use crate::euler::fields_with;
use crate::kernels::{FreeSpaceConvolver, GridSpec, ScalarGrid, Vec2, VectorGrid};

/// Grid used for the symbol when nothing else is configured.
pub fn default_symbol_grid() -> GridSpec {
    GridSpec::new(3.0, 256).expect("valid default grid")
}

#[derive(Debug, Clone)]
pub struct GyroSymbol {
    omega: ScalarGrid,
    theta: VectorGrid,
    eps: f64,
    hbar: f64,
}

impl GyroSymbol {
    pub fn new(omega: ScalarGrid, theta: VectorGrid, eps: f64, hbar: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("must be positive, got {eps}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", format!("must be positive, got {hbar}")));
        }
        if omega.spec() != theta.spec() {
            return Err(Error::GridMismatch);
        }
        let spec = *omega.spec();
        for (k, (&w, t)) in omega.data().iter().zip((0..spec.len()).map(|k| theta.at_flat(k))).enumerate() {
            if !w.is_finite() || !t.is_finite() {
                return Err(Error::NonFinite { what: "symbol".into() });
            }
            if w < 0.0 {
                return Err(Error::NegativeDensity { point: spec.node_of(k) });
            }
        }
        let mass = omega.integral();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::WeightsNotNormalized { sum: mass });
        }
        let n = spec.cells();
        let on_edge = |ix: usize, iy: usize| ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1;
        for iy in 0..n {
            for ix in 0..n {
                if on_edge(ix, iy) && omega.at(ix, iy) > 0.0 {
                    return Err(Error::SupportOnBoundary { point: spec.node(ix, iy) });
                }
            }
        }
        Ok(Self { omega, theta, eps, hbar })
    }

    /// `omega = chi G_{1/2} / Lambda`, renormalized on the grid.
    pub fn cutoff_gaussian(
        spec: GridSpec,
        theta: impl Fn(Vec2) -> Vec2,
        eps: f64,
        hbar: f64,
    ) -> Result<Self> {
        let raw = RadialDensity::cutoff_gaussian().to_grid(spec);
        let omega = raw.scaled(1.0 / raw.integral());
        Self::new(omega, VectorGrid::from_fn(spec, theta), eps, hbar)
    }

    pub fn omega(&self) -> &ScalarGrid {
        &self.omega
    }

    pub fn theta(&self) -> &VectorGrid {
        &self.theta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn hbar_over_eps(&self) -> f64 {
        self.hbar / self.eps
    }

    /// The limit requires `hbar / eps -> 0`; ratios at or above 1 are out of regime.
    pub fn in_regime(&self) -> bool {
        self.hbar_over_eps() < 1.0
    }

    /// Graph measure on the support lattice: `(q_j, theta_j - q_j^perp / 2 eps)`
    /// with weight `omega_j h^2`.
    pub fn atoms(&self) -> Vec<Atom> {
        let spec = *self.omega.spec();
        let area = spec.cell_area();
        self.omega
            .data()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(k, &w)| {
                let q = spec.node_of(k);
                let p = self.theta.at_flat(k) - q.perp() / (2.0 * self.eps);
                Atom::new(PhasePoint { q, p }, w * area)
            })
            .collect()
    }

    /// `rho = G_{hbar/2} * omega`.
    pub fn smoothed(&self, conv: &FreeSpaceConvolver) -> Result<ScalarGrid> {
        conv.gaussian(&self.omega, self.hbar / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section5Report {
    pub eps: f64,
    pub hbar: f64,
    pub hbar_over_eps: f64,
    pub n: usize,
    pub in_regime: bool,
    /// `eps int omega |theta|^2`.
    pub drift: f64,
    /// `eps trace(K OP)` from the atomwise closed form.
    pub kinetic: f64,
    /// `kinetic - drift`.
    pub kinetic_correction: f64,
    /// `hbar / 4 eps + eps hbar`.
    pub correction_closed_form: f64,
    /// `eps (int |q|^2 omega + hbar)`.
    pub confinement: f64,
    /// `eps (1 + hbar) int |q|^2 omega`.
    pub confinement_as_printed: f64,
    /// `int ((N-1)/N V*rho - V*mu) rho`.
    pub i: f64,
    /// `int V*mu (mu - rho)`.
    pub j: f64,
    /// `J` with `rho` replaced by `omega`.
    pub j_unsmoothed: f64,
}

/// Evaluates the kinetic, confinement, `I` and `J` terms of the initial energy.
/// `mu = omega + eps frak_u` uses the Euler fields of `omega`.
pub fn section5_initial_energy(
    sym: &GyroSymbol,
    n: usize,
    conv: &FreeSpaceConvolver,
) -> Result<Section5Report> {
    if n == 0 {
        return Err(invalid("n", "need at least one particle"));
    }
    if conv.spec() != sym.omega.spec() {
        return Err(Error::GridMismatch);
    }
    let (eps, hbar) = (sym.eps, sym.hbar);
    let spec = *sym.omega.spec();
    let area = spec.cell_area();

    let mut drift = 0.0;
    let mut second_moment = 0.0;
    for (k, &w) in sym.omega.data().iter().enumerate() {
        drift += w * sym.theta.at_flat(k).norm_sq() * area;
        second_moment += w * spec.node_of(k).norm_sq() * area;
    }
    drift *= eps;
    let kinetic = eps * kinetic_closed_form(&sym.atoms(), eps, hbar);

    let fields = fields_with(conv, sym.omega.clone(), eps)?;
    let mu = &fields.mu;
    let v_mu = conv.potential(mu)?;
    let rho = sym.smoothed(conv)?;
    let v_rho = conv.potential(&rho)?;
    let nf = n as f64;
    let i = v_rho.scaled((nf - 1.0) / nf).add_scaled(&v_mu, -1.0)?.dot(&rho)?;
    let j = v_mu.dot(&mu.add_scaled(&rho, -1.0)?)?;
    let j_unsmoothed = v_mu.dot(&mu.add_scaled(&sym.omega, -1.0)?)?;

    let report = Section5Report {
        eps,
        hbar,
        hbar_over_eps: sym.hbar_over_eps(),
        n,
        in_regime: sym.in_regime(),
        drift,
        kinetic,
        kinetic_correction: kinetic - drift,
        correction_closed_form: hbar / (4.0 * eps) + eps * hbar,
        confinement: eps * (second_moment + hbar),
        confinement_as_printed: eps * (1.0 + hbar) * second_moment,
        i,
        j,
        j_unsmoothed,
    };
    let values = [report.kinetic, report.confinement, report.i, report.j, report.j_unsmoothed];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "initial energy".into() });
    }
    Ok(report)
}
