//! Toeplitz (anti-Wick) quantization in the truncated Hermite basis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::coherent::{axis_coefficients, coherent_coefficients, PhasePoint};
use super::hermite::HermiteTruncation;
use crate::error::{invalid, Error, Result};

/// A weighted phase point of a discrete measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub z: PhasePoint,
    pub weight: f64,
}

impl Atom {
    pub fn new(z: PhasePoint, weight: f64) -> Self {
        Self { z, weight }
    }
}

fn validate(atoms: &[Atom]) -> Result<()> {
    for (k, a) in atoms.iter().enumerate() {
        if !a.z.is_finite() || !a.weight.is_finite() {
            return Err(Error::NonFinite { what: format!("atom {k}") });
        }
        if a.weight < 0.0 {
            return Err(invalid("weight", format!("atom {k} has negative weight {}", a.weight)));
        }
    }
    Ok(())
}

/// `OP(nu) = (2 pi hbar)^{-2} sum_k w_k |z_k><z_k|` restricted to the basis.
pub fn toeplitz_matrix(atoms: &[Atom], trunc: &HermiteTruncation) -> Result<DMatrix<Complex64>> {
    validate(atoms)?;
    let scale = (2.0 * PI * trunc.hbar()).powi(-2);
    let coeffs: Vec<Vec<Complex64>> = atoms
        .par_iter()
        .map(|a| coherent_coefficients(&a.z, trunc))
        .collect();
    Ok(outer_sum(&coeffs, atoms.iter().map(|a| a.weight * scale), trunc.basis_size()))
}

/// `sum_k w_k c_k c_k^dag`, rows assembled in parallel, atoms summed in order.
fn outer_sum(
    coeffs: &[Vec<Complex64>],
    weights: impl Iterator<Item = f64>,
    n: usize,
) -> DMatrix<Complex64> {
    let weights: Vec<f64> = weights.collect();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for (c, &w) in coeffs.iter().zip(&weights) {
                let ci = c[i] * w;
                for (r, cj) in row.iter_mut().zip(c) {
                    *r += ci * cj.conj();
                }
            }
            row
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Trapezoid nodes for one phase plane, spaced in oscillator units and wide
/// enough for symbols of polynomial growth against the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneQuadrature {
    /// Step in units of `sqrt(2 hbar)`.
    pub step: f64,
    /// Half-width in units of `sqrt(2 hbar)`.
    pub radius: f64,
}

impl PlaneQuadrature {
    pub fn for_truncation(trunc: &HermiteTruncation) -> Self {
        Self {
            step: 0.4,
            radius: (trunc.max_degree() as f64 + 2.0).sqrt() + 7.0,
        }
    }

    fn nodes(&self, hbar: f64) -> (Vec<f64>, f64) {
        let s = (2.0 * hbar).sqrt();
        let count = (self.radius / self.step).ceil() as i64;
        let nodes = (-count..=count).map(|k| k as f64 * self.step * s).collect();
        (nodes, self.step * s)
    }
}

/// `(2 pi hbar)^{-1} int f(q, p) |z><z| dq dp` on one axis.
pub fn axis_symbol_operator(
    f: impl Fn(f64, f64) -> f64,
    trunc: &HermiteTruncation,
    quad: PlaneQuadrature,
) -> DMatrix<Complex64> {
    let hbar = trunc.hbar();
    let (nodes, h) = quad.nodes(hbar);
    let mut coeffs = Vec::with_capacity(nodes.len() * nodes.len());
    let mut weights = Vec::with_capacity(nodes.len() * nodes.len());
    for &q in &nodes {
        for &p in &nodes {
            coeffs.push(axis_coefficients(q, p, trunc));
            weights.push(f(q, p) * h * h / (2.0 * PI * hbar));
        }
    }
    outer_sum(&coeffs, weights.into_iter(), trunc.axis_len())
}

/// Largest entry of `|A - A^dag|`.
pub fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    (a - a.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn trace(a: &DMatrix<Complex64>) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `trace(A B)` without forming the product.
pub fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Vec2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_entry(a: &DMatrix<Complex64>) -> f64 {
        a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_atom_gives_coherent_projector() {
        let hbar = 0.1;
        let trunc = HermiteTruncation::new(hbar, 16).unwrap();
        let z = PhasePoint::new(Vec2::new(0.2, -0.1), Vec2::new(0.1, 0.3)).unwrap();
        let w = (2.0 * PI * hbar).powi(2);
        let op = toeplitz_matrix(&[Atom::new(z, w)], &trunc).unwrap();
        assert!((trace(&op).re - 1.0).abs() < 1e-8);
        let ev = hermitian_eigenvalues(&op);
        assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-8);
        assert!(ev[..ev.len() - 1].iter().all(|v| v.abs() < 1e-8));
        assert!(hermitian_defect(&op) < 1e-12);
    }

    #[test]
    fn random_positive_measures_give_psd_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trunc = HermiteTruncation::new(0.15, 6).unwrap();
        for _ in 0..5 {
            let atoms: Vec<Atom> = (0..40)
                .map(|_| {
                    let q = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let p = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    Atom::new(PhasePoint::new(q, p).unwrap(), rng.gen_range(0.0..1.0))
                })
                .collect();
            let op = toeplitz_matrix(&atoms, &trunc).unwrap();
            assert!(hermitian_defect(&op) <= 1e-12);
            assert!(hermitian_eigenvalues(&op)[0] >= -1e-10);
        }
    }

    #[test]
    fn full_trace_matches_total_mass() {
        // Inside the basis the trace is (2 pi hbar)^{-2} sum w up to the lost tail.
        let hbar = 0.2;
        let trunc = HermiteTruncation::new(hbar, 30).unwrap();
        let atoms = [
            Atom::new(PhasePoint::new(Vec2::new(0.1, 0.0), Vec2::new(0.0, 0.2)).unwrap(), 0.3),
            Atom::new(PhasePoint::new(Vec2::new(-0.3, 0.2), Vec2::new(0.1, 0.0)).unwrap(), 0.7),
        ];
        let op = toeplitz_matrix(&atoms, &trunc).unwrap();
        let expected = (2.0 * PI * hbar).powi(-2);
        assert!((trace(&op).re / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_symbol_quantizes_to_identity() {
        // Direct quadrature of the constant symbol over a box in all four
        // phase coordinates.
        let hbar = 0.1;
        let trunc = HermiteTruncation::new(hbar, 4).unwrap();
        let s = (2.0 * hbar).sqrt();
        let step = 0.6 * s;
        let count = (5.0 / 0.6_f64).ceil() as i64;
        let nodes: Vec<f64> = (-count..=count).map(|k| k as f64 * step).collect();
        let cell = step.powi(4);
        let mut atoms = Vec::new();
        for &q1 in &nodes {
            for &q2 in &nodes {
                for &p1 in &nodes {
                    for &p2 in &nodes {
                        let z = PhasePoint::new(Vec2::new(q1, q2), Vec2::new(p1, p2)).unwrap();
                        atoms.push(Atom::new(z, cell));
                    }
                }
            }
        }
        let op = toeplitz_matrix(&atoms, &trunc).unwrap();
        let id = DMatrix::<Complex64>::identity(trunc.basis_size(), trunc.basis_size());
        let err = max_entry(&(op - id));
        assert!(err < 1e-3, "{err:e}");
    }

    #[test]
    fn axis_constant_symbol_is_identity() {
        let trunc = HermiteTruncation::new(0.05, 10).unwrap();
        let quad = PlaneQuadrature::for_truncation(&trunc);
        let op = axis_symbol_operator(|_, _| 1.0, &trunc, quad);
        let err = max_entry(&(op - DMatrix::identity(11, 11)));
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn rejects_bad_weights() {
        let trunc = HermiteTruncation::new(0.1, 4).unwrap();
        let z = PhasePoint::origin();
        assert!(toeplitz_matrix(&[Atom::new(z, -1.0)], &trunc).is_err());
        assert!(toeplitz_matrix(&[Atom::new(z, f64::NAN)], &trunc).is_err());
    }
}
