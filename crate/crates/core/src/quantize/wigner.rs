//! Wigner and Husimi transforms of operators given in the Hermite basis.
//!
//! For the axis basis the Wigner function of `|m><n|` (`m <= n`) is
//! `(-1)^m / (pi hbar) sqrt(m!/n!) beta^{n-m} exp(-|beta|^2/2) L_m^{(n-m)}(|beta|^2)`
//! with `beta = sqrt(2/hbar)(q + i p)`; the `m > n` entries are conjugates.
//! The Husimi function is `(2 pi hbar)^{-d} <z|A|z>`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::coherent::{axis_coefficients, coherent_coefficients, PhasePoint};
use super::hermite::HermiteTruncation;
use crate::error::{invalid, Error, Result};
use crate::kernels::{GridSpec, ScalarGrid, Vec2};

/// All `W_{mn}(q, p)` for one axis, row-major `(M+1) x (M+1)`.
pub fn axis_wigner_table(q: f64, p: f64, trunc: &HermiteTruncation) -> Vec<Complex64> {
    let hbar = trunc.hbar();
    let len = trunc.axis_len();
    let beta = Complex64::new(q, p) * (2.0 / hbar).sqrt();
    let b2 = beta.norm_sqr();
    let (log_r, arg) = (0.5 * b2.ln(), beta.arg());
    let mut out = vec![Complex64::new(0.0, 0.0); len * len];
    let mut log_fact = vec![0.0_f64; len];
    for k in 1..len {
        log_fact[k] = log_fact[k - 1] + (k as f64).ln();
    }
    for k in 0..len {
        let kf = k as f64;
        // L_m^{(k)}(b2) for m = 0..len-k by the three-term recurrence.
        let mut l_prev = 0.0;
        let mut l_cur = 1.0;
        for m in 0..len - k {
            if m > 0 {
                let mf = m as f64;
                let next = ((2.0 * mf - 1.0 + kf - b2) * l_cur - (mf - 1.0 + kf) * l_prev) / mf;
                l_prev = l_cur;
                l_cur = next;
            }
            let n = m + k;
            let power = if k == 0 {
                Complex64::new(1.0, 0.0)
            } else if b2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((kf * log_r + 0.5 * (log_fact[m] - log_fact[n])).exp(), kf * arg)
            };
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let v = power * (sign * (-0.5 * b2).exp() * l_cur / (PI * hbar));
            out[m * len + n] = v;
            out[n * len + m] = v.conj();
        }
    }
    out
}

/// Wigner function of an axis operator at `(q, p)`.
pub fn wigner_axis(b: &DMatrix<Complex64>, q: f64, p: f64, trunc: &HermiteTruncation) -> f64 {
    let len = trunc.axis_len();
    let table = axis_wigner_table(q, p, trunc);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..len {
        for n in 0..len {
            acc += b[(m, n)] * table[m * len + n];
        }
    }
    acc.re
}

/// Husimi function of an axis operator, `(2 pi hbar)^{-1} <z|B|z>`.
pub fn husimi_axis(b: &DMatrix<Complex64>, q: f64, p: f64, trunc: &HermiteTruncation) -> f64 {
    let c = axis_coefficients(q, p, trunc);
    quadratic_form(b, &c) / (2.0 * PI * trunc.hbar())
}

/// Wigner function of a planar operator at `z`.
pub fn wigner_at(a: &DMatrix<Complex64>, z: &PhasePoint, trunc: &HermiteTruncation) -> f64 {
    let len = trunc.axis_len();
    let t1 = axis_wigner_table(z.q.x, z.p.x, trunc);
    let t2 = axis_wigner_table(z.q.y, z.p.y, trunc);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..trunc.basis_size() {
        let (m1, m2) = trunc.degrees(i);
        for j in 0..trunc.basis_size() {
            let (n1, n2) = trunc.degrees(j);
            acc += a[(i, j)] * t1[m1 * len + n1] * t2[m2 * len + n2];
        }
    }
    acc.re
}

/// Husimi function of a planar operator, `(2 pi hbar)^{-2} <z|A|z>`.
pub fn husimi_at(a: &DMatrix<Complex64>, z: &PhasePoint, trunc: &HermiteTruncation) -> f64 {
    let c = coherent_coefficients(z, trunc);
    quadratic_form(a, &c) / (2.0 * PI * trunc.hbar()).powi(2)
}

fn quadratic_form(a: &DMatrix<Complex64>, c: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            acc += ci.conj() * a[(i, j)] * cj;
        }
    }
    acc.re
}

/// A plane through phase space: `(q_axis, p_axis)` vary over the grid, the
/// other axis is frozen at `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSlice {
    pub axis: usize,
    pub other_q: f64,
    pub other_p: f64,
}

impl PhaseSlice {
    pub fn new(axis: usize, other_q: f64, other_p: f64) -> Result<Self> {
        if axis > 1 {
            return Err(invalid("axis", format!("must be 0 or 1, got {axis}")));
        }
        Ok(Self { axis, other_q, other_p })
    }

    /// Phase point for grid coordinates `(q, p)` of the sliced axis.
    pub fn point(&self, q: f64, p: f64) -> PhasePoint {
        if self.axis == 0 {
            PhasePoint { q: Vec2::new(q, self.other_q), p: Vec2::new(p, self.other_p) }
        } else {
            PhasePoint { q: Vec2::new(self.other_q, q), p: Vec2::new(self.other_p, p) }
        }
    }
}

fn check_resolution(spec: &GridSpec, hbar: f64) -> Result<()> {
    let required = hbar.sqrt() / 4.0;
    if spec.spacing() > required {
        return Err(Error::UnderResolved { spacing: spec.spacing(), required });
    }
    Ok(())
}

fn tabulate(spec: GridSpec, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<ScalarGrid> {
    let n = spec.cells();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|iy| (0..n).map(|ix| f(spec.coord(ix), spec.coord(iy))).collect())
        .collect();
    ScalarGrid::from_vec(spec, rows.concat())
}

/// Wigner function of an axis operator tabulated on `(q, p)`.
pub fn wigner_axis_grid(
    b: &DMatrix<Complex64>,
    spec: GridSpec,
    trunc: &HermiteTruncation,
) -> Result<ScalarGrid> {
    check_resolution(&spec, trunc.hbar())?;
    tabulate(spec, |q, p| wigner_axis(b, q, p, trunc))
}

pub fn husimi_axis_grid(
    b: &DMatrix<Complex64>,
    spec: GridSpec,
    trunc: &HermiteTruncation,
) -> Result<ScalarGrid> {
    check_resolution(&spec, trunc.hbar())?;
    tabulate(spec, |q, p| husimi_axis(b, q, p, trunc))
}

/// Wigner function of a planar operator on a phase slice.
pub fn wigner_slice(
    a: &DMatrix<Complex64>,
    slice: PhaseSlice,
    spec: GridSpec,
    trunc: &HermiteTruncation,
) -> Result<ScalarGrid> {
    check_resolution(&spec, trunc.hbar())?;
    tabulate(spec, |q, p| wigner_at(a, &slice.point(q, p), trunc))
}

pub fn husimi_slice(
    a: &DMatrix<Complex64>,
    slice: PhaseSlice,
    spec: GridSpec,
    trunc: &HermiteTruncation,
) -> Result<ScalarGrid> {
    check_resolution(&spec, trunc.hbar())?;
    tabulate(spec, |q, p| husimi_at(a, &slice.point(q, p), trunc))
}
