//! Matrix identities for quadratic symbols and the magnetic kinetic trace.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::hermite::HermiteTruncation;
use super::toeplitz::{axis_symbol_operator, toeplitz_matrix, trace_product, Atom, PlaneQuadrature};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticIdentityReport {
    pub hbar: f64,
    pub max_degree: usize,
    /// Interior-block sup of `OP(|q|^2) - x.x - hbar I`.
    pub position_residual: f64,
    /// Interior-block sup of `OP(|p|^2) - P.P - hbar I`.
    pub momentum_residual: f64,
    /// Mean interior diagonal of `OP(|q|^2) - x.x`.
    pub position_shift: f64,
    /// Mean interior diagonal of `OP(|p|^2) - P.P`.
    pub momentum_shift: f64,
}

/// Quantizes `|q|^2` and `|p|^2` by phase-plane quadrature and compares with
/// the truncated products of the position and momentum matrices.
pub fn quadratic_symbol_identities(trunc: &HermiteTruncation) -> Result<QuadraticIdentityReport> {
    let hbar = trunc.hbar();
    let quad = PlaneQuadrature::for_truncation(trunc);
    let one = axis_symbol_operator(|_, _| 1.0, trunc, quad);
    let q2 = axis_symbol_operator(|q, _| q * q, trunc, quad);
    let p2 = axis_symbol_operator(|_, p| p * p, trunc, quad);
    let op_q = q2.kronecker(&one) + one.kronecker(&q2);
    let op_p = p2.kronecker(&one) + one.kronecker(&p2);

    let x = trunc.position();
    let p = trunc.momentum();
    let xx = &x * &x;
    let pp = &p * &p;
    let prod_q = trunc.on_axis(0, &xx) + trunc.on_axis(1, &xx);
    let prod_p = trunc.on_axis(0, &pp) + trunc.on_axis(1, &pp);

    let interior = trunc.interior();
    let compare = |op: &DMatrix<Complex64>, prod: &DMatrix<Complex64>| {
        let mut worst = 0.0_f64;
        let mut diag = 0.0;
        for &i in &interior {
            for &j in &interior {
                let d = op[(i, j)] - prod[(i, j)];
                let target = if i == j { hbar } else { 0.0 };
                worst = worst.max((d - target).norm());
                if i == j {
                    diag += d.re;
                }
            }
        }
        (worst, diag / interior.len() as f64)
    };
    let (position_residual, position_shift) = compare(&op_q, &prod_q);
    let (momentum_residual, momentum_shift) = compare(&op_p, &prod_p);
    Ok(QuadraticIdentityReport {
        hbar,
        max_degree: trunc.max_degree(),
        position_residual,
        momentum_residual,
        position_shift,
        momentum_shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticTrace {
    /// `int |p + q^perp / 2 eps|^2 nu + (hbar / 4 eps^2 + hbar) nu(total)`.
    pub closed_form: f64,
    /// `trace(K OP((2 pi hbar)^2 nu))` in the truncated basis.
    pub numeric: f64,
    pub relative_error: f64,
}

/// Closed form of the magnetic kinetic trace for a discrete measure.
pub fn kinetic_closed_form(atoms: &[Atom], eps: f64, hbar: f64) -> f64 {
    let per_atom = hbar / (4.0 * eps * eps) + hbar;
    atoms
        .iter()
        .map(|a| a.weight * ((a.z.p + a.z.q.perp() / (2.0 * eps)).norm_sq() + per_atom))
        .sum()
}

/// Compares the closed form with the truncated-basis trace. Fails when a
/// coherent state of the measure is not resolved by the basis.
pub fn kinetic_trace_identity(
    atoms: &[Atom],
    eps: f64,
    trunc: &HermiteTruncation,
) -> Result<KineticTrace> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    let hbar = trunc.hbar();
    let m = trunc.max_degree() as f64;
    for a in atoms {
        for alpha in a.z.amplitudes(hbar) {
            let r = alpha.norm();
            if r * r + 3.0 * r + 2.0 > m {
                return Err(Error::Truncation {
                    degree: trunc.max_degree(),
                    reason: format!("coherent amplitude {r:.3} is not resolved"),
                });
            }
        }
    }
    let scale = (2.0 * PI * hbar).powi(2);
    let scaled: Vec<Atom> = atoms.iter().map(|a| Atom::new(a.z, a.weight * scale)).collect();
    let op = toeplitz_matrix(&scaled, trunc)?;
    let k = trunc.magnetic_kinetic(eps)?;
    let numeric = trace_product(&k, &op).re;
    let closed_form = kinetic_closed_form(atoms, eps, hbar);
    if !numeric.is_finite() || !closed_form.is_finite() {
        return Err(Error::NonFinite { what: "kinetic trace".into() });
    }
    Ok(KineticTrace {
        closed_form,
        numeric,
        relative_error: (numeric - closed_form).abs() / closed_form.abs(),
    })
}
