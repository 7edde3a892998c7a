use crate::error::{invalid, Result};
use crate::kernels::{FreeSpaceConvolver, GridSpec, ScalarGrid, TensorGrid, VectorGrid};

use super::VortexBlobs;

/// Grid fields of one Euler state.
#[derive(Debug, Clone)]
pub struct EulerFields {
    pub omega: ScalarGrid,
    /// Stream function, `psi = -V * omega`.
    pub psi: ScalarGrid,
    /// `u = (grad psi)^perp`.
    pub u: VectorGrid,
    /// `grad_u[i][j] = d_i u^j`.
    pub grad_u: TensorGrid,
    /// `sum_{ij} d_i u^j d_j u^i`.
    pub frak_u: ScalarGrid,
    /// Pressure, `-Laplacian P = frak_u`.
    pub pressure: ScalarGrid,
    /// `omega + eps frak_u`.
    pub mu: ScalarGrid,
    pub eps: f64,
}

impl EulerFields {
    pub fn spec(&self) -> &GridSpec {
        self.omega.spec()
    }
}

pub fn fields_from_blobs(blobs: &VortexBlobs, spec: GridSpec, eps: f64) -> Result<EulerFields> {
    let omega = blobs.deposit(spec)?;
    fields_from_vorticity_grid(omega, eps)
}

pub fn fields_from_vorticity_grid(omega: ScalarGrid, eps: f64) -> Result<EulerFields> {
    fields_with(&FreeSpaceConvolver::new(*omega.spec()), omega, eps)
}

/// As [`fields_from_vorticity_grid`], reusing a convolver's cached spectra.
pub fn fields_with(conv: &FreeSpaceConvolver, omega: ScalarGrid, eps: f64) -> Result<EulerFields> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be nonnegative, got {eps}")));
    }
    let psi = conv.potential(&omega)?.scaled(-1.0);
    let u = psi.gradient().perp();
    let grad_u = u.jacobian();
    let frak_u = grad_u.contraction();
    let pressure = conv.potential(&frak_u)?;
    let mu = omega.add_scaled(&frak_u, eps)?;
    Ok(EulerFields { omega, psi, u, grad_u, frak_u, pressure, mu, eps })
}

/// Grid `L^p` norms of the Frobenius norm of `grad u`, paired with `norm/p`.
/// `p = inf` gives the max norm.
pub fn grad_u_norms(fields: &EulerFields, ps: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let frob = fields.grad_u.frobenius();
    let area = fields.spec().cell_area();
    ps.iter()
        .map(|&p| {
            if !(p >= 1.0) {
                return Err(invalid("p", format!("must be at least 1, got {p}")));
            }
            let norm = if p.is_infinite() {
                frob.max_abs()
            } else {
                let scale = frob.max_abs();
                if scale == 0.0 {
                    0.0
                } else {
                    let s: f64 = frob.data().iter().map(|v| (v / scale).powf(p)).sum();
                    scale * (area * s).powf(1.0 / p)
                }
            };
            Ok((p, norm, norm / p))
        })
        .collect()
}
