//! Harmonic-oscillator basis at scale `hbar`.
//!
//! Per axis the basis functions are
//! `phi_n(x) = (pi hbar)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt(hbar)) exp(-x^2 / 2 hbar)`
//! and the planar basis is the tensor product, indexed `n1 * (M + 1) + n2`.
//! With `a = (x / sqrt(hbar) + sqrt(hbar) d/dx) / sqrt(2)`:
//! `x = sqrt(hbar/2) (a + a^dag)` and `-i hbar d/dx = -i sqrt(hbar/2) (a - a^dag)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const MIN_DEGREE: usize = 4;

/// Truncated planar Hermite basis: degrees `0..=M` on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteTruncation {
    hbar: f64,
    max_degree: usize,
}

impl HermiteTruncation {
    pub fn new(hbar: f64, max_degree: usize) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", format!("must be positive, got {hbar}")));
        }
        if max_degree < MIN_DEGREE {
            return Err(Error::Truncation {
                degree: max_degree,
                reason: format!("need at least {MIN_DEGREE} per axis"),
            });
        }
        Ok(Self { hbar, max_degree })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Number of modes per axis, `M + 1`.
    pub fn axis_len(&self) -> usize {
        self.max_degree + 1
    }

    /// `(M + 1)^2`.
    pub fn basis_size(&self) -> usize {
        self.axis_len() * self.axis_len()
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.axis_len() + n2
    }

    pub fn degrees(&self, k: usize) -> (usize, usize) {
        (k / self.axis_len(), k % self.axis_len())
    }

    /// Indices with both degrees at most `M - 2`.
    pub fn interior(&self) -> Vec<usize> {
        let top = self.max_degree - 2;
        (0..self.basis_size())
            .filter(|&k| {
                let (a, b) = self.degrees(k);
                a <= top && b <= top
            })
            .collect()
    }

    /// Values `phi_0(x) ..= phi_M(x)` by the normalized three-term recurrence.
    pub fn axis_functions(&self, x: f64) -> Vec<f64> {
        let xi = x / self.hbar.sqrt();
        let mut out = Vec::with_capacity(self.axis_len());
        let p0 = (std::f64::consts::PI * self.hbar).powf(-0.25) * (-0.5 * xi * xi).exp();
        out.push(p0);
        out.push(std::f64::consts::SQRT_2 * xi * p0);
        for n in 2..self.axis_len() {
            let nf = n as f64;
            let next = (2.0 / nf).sqrt() * xi * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
            out.push(next);
        }
        out
    }

    /// Planar basis function `phi_{n1}(x1) phi_{n2}(x2)` for every index.
    pub fn basis_values(&self, x1: f64, x2: f64) -> Vec<f64> {
        let a = self.axis_functions(x1);
        let b = self.axis_functions(x2);
        let mut out = Vec::with_capacity(self.basis_size());
        for ai in &a {
            for bi in &b {
                out.push(ai * bi);
            }
        }
        out
    }

    /// Annihilation operator on one axis.
    pub fn lowering(&self) -> DMatrix<f64> {
        let n = self.axis_len();
        DMatrix::from_fn(n, n, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
    }

    /// Position on one axis, `sqrt(hbar/2)(a + a^dag)`.
    pub fn position(&self) -> DMatrix<Complex64> {
        let a = self.lowering();
        let x = (&a + a.transpose()) * (self.hbar / 2.0).sqrt();
        x.map(|v| Complex64::new(v, 0.0))
    }

    /// Momentum on one axis, `-i sqrt(hbar/2)(a - a^dag)`.
    pub fn momentum(&self) -> DMatrix<Complex64> {
        let a = self.lowering();
        let d = (&a - a.transpose()) * (self.hbar / 2.0).sqrt();
        d.map(|v| Complex64::new(0.0, -v))
    }

    /// Exact matrix elements of `x^2` on one axis (not the truncated product).
    pub fn position_sq(&self) -> DMatrix<Complex64> {
        self.quadratic(1.0)
    }

    /// Exact matrix elements of `(-i hbar d/dx)^2` on one axis.
    pub fn momentum_sq(&self) -> DMatrix<Complex64> {
        self.quadratic(-1.0)
    }

    // (hbar/2)(sign (a^2 + a^dag^2) + 2 a^dag a + 1)
    fn quadratic(&self, sign: f64) -> DMatrix<Complex64> {
        let n = self.axis_len();
        let h = self.hbar / 2.0;
        DMatrix::from_fn(n, n, |i, j| {
            let v = if i == j {
                h * (2 * i + 1) as f64
            } else if i == j + 2 || j == i + 2 {
                let lo = i.min(j) as f64;
                sign * h * ((lo + 1.0) * (lo + 2.0)).sqrt()
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        })
    }

    /// Lifts a single-axis operator to the plane (`axis` 0 or 1).
    pub fn on_axis(&self, axis: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let id = DMatrix::<Complex64>::identity(self.axis_len(), self.axis_len());
        if axis == 0 {
            op.kronecker(&id)
        } else {
            id.kronecker(op)
        }
    }

    /// `|x|^2` on the plane.
    pub fn radius_sq(&self) -> DMatrix<Complex64> {
        let x2 = self.position_sq();
        self.on_axis(0, &x2) + self.on_axis(1, &x2)
    }

    /// `|-i hbar grad|^2` on the plane.
    pub fn momentum_norm_sq(&self) -> DMatrix<Complex64> {
        let p2 = self.momentum_sq();
        self.on_axis(0, &p2) + self.on_axis(1, &p2)
    }

    /// Magnetic kinetic operator `sum_k (-i hbar d_k + (x^perp)^k / 2 eps)^2`
    /// with `x^perp = (-x2, x1)`, expanded as
    /// `|P|^2 + |x|^2 / 4 eps^2 + (x1 P2 - x2 P1) / eps`. All entries are exact.
    pub fn magnetic_kinetic(&self, eps: f64) -> Result<DMatrix<Complex64>> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("must be positive, got {eps}")));
        }
        let x = self.position();
        let p = self.momentum();
        let angular = x.kronecker(&p) - p.kronecker(&x);
        let scale = Complex64::new(1.0 / (4.0 * eps * eps), 0.0);
        Ok(self.momentum_norm_sq() + self.radius_sq() * scale + angular * Complex64::new(1.0 / eps, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid_gram(t: &HermiteTruncation) -> DMatrix<f64> {
        let s = t.hbar().sqrt();
        let h = s / 8.0;
        let half = ((2.0 * t.max_degree() as f64 + 1.0).sqrt() + 10.0) * s;
        let count = (2.0 * half / h).ceil() as usize;
        let n = t.axis_len();
        let mut g = DMatrix::zeros(n, n);
        for k in 0..=count {
            let x = -half + k as f64 * h;
            let v = t.axis_functions(x);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += v[i] * v[j] * h;
                }
            }
        }
        g
    }

    #[test]
    fn rejects_small_truncation() {
        assert!(matches!(HermiteTruncation::new(0.1, 3), Err(Error::Truncation { .. })));
        assert!(HermiteTruncation::new(0.0, 8).is_err());
    }

    #[test]
    fn basis_is_orthonormal_under_quadrature() {
        for hbar in [0.1, 0.02] {
            let t = HermiteTruncation::new(hbar, 24).unwrap();
            let g = trapezoid_gram(&t);
            let err = (g - DMatrix::identity(25, 25)).abs().max();
            assert!(err < 1e-12, "hbar {hbar}: {err:e}");
        }
    }

    #[test]
    fn ladder_matches_derivatives() {
        // x phi_n and -i hbar phi_n' against the ladder matrices, pointwise.
        let t = HermiteTruncation::new(0.3, 8).unwrap();
        let x_mat = t.position();
        let p_mat = t.momentum();
        let dx = 1e-5;
        for &x in &[-0.7, 0.1, 0.9] {
            let v = t.axis_functions(x);
            let vp = t.axis_functions(x + dx);
            let vm = t.axis_functions(x - dx);
            for n in 0..7 {
                let mut xs = 0.0;
                let mut ps = Complex64::new(0.0, 0.0);
                for m in 0..9 {
                    xs += x_mat[(m, n)].re * v[m];
                    ps += p_mat[(m, n)] * v[m];
                }
                assert!((xs - x * v[n]).abs() < 1e-12);
                let deriv = (vp[n] - vm[n]) / (2.0 * dx);
                let expected = Complex64::new(0.0, -0.3 * deriv);
                assert!((ps - expected).norm() < 1e-7, "n {n}");
            }
        }
    }

    #[test]
    fn exact_squares_agree_with_products_below_the_top() {
        let t = HermiteTruncation::new(0.2, 6).unwrap();
        let x = t.position();
        let p = t.momentum();
        let xx = &x * &x;
        let pp = &p * &p;
        for i in 0..6 {
            for j in 0..6 {
                assert!((xx[(i, j)] - t.position_sq()[(i, j)]).norm() < 1e-14);
                assert!((pp[(i, j)] - t.momentum_sq()[(i, j)]).norm() < 1e-14);
            }
        }
        // Truncation shows up only in the top corner.
        assert!((xx[(6, 6)] - t.position_sq()[(6, 6)]).norm() > 1e-3);
    }

    #[test]
    fn kinetic_operator_is_hermitian() {
        let t = HermiteTruncation::new(0.1, 6).unwrap();
        let k = t.magnetic_kinetic(0.5).unwrap();
        assert!((&k - k.adjoint()).iter().all(|c| c.norm() < 1e-14));
        assert!(t.magnetic_kinetic(0.0).is_err());
    }

    #[test]
    fn interior_excludes_top_two_degrees() {
        let t = HermiteTruncation::new(0.1, 4).unwrap();
        assert_eq!(t.interior().len(), 9);
        assert_eq!(t.degrees(t.index(3, 2)), (3, 2));
    }
}
