//! Phase points and Gaussian coherent states.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::hermite::HermiteTruncation;
use crate::error::{invalid, Error, Result};
use crate::kernels::Vec2;

/// `z = (q, p)` in the four-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub q: Vec2,
    pub p: Vec2,
}

impl PhasePoint {
    pub fn new(q: Vec2, p: Vec2) -> Result<Self> {
        let z = Self { q, p };
        if !z.is_finite() {
            return Err(Error::NonFinite { what: "phase point".into() });
        }
        Ok(z)
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }

    pub fn distance_sq(&self, other: &PhasePoint) -> f64 {
        (self.q - other.q).norm_sq() + (self.p - other.p).norm_sq()
    }

    /// Oscillator amplitudes `alpha_k = (q_k + i p_k) / sqrt(2 hbar)`.
    pub fn amplitudes(&self, hbar: f64) -> [Complex64; 2] {
        let s = (2.0 * hbar).sqrt();
        [
            Complex64::new(self.q.x / s, self.p.x / s),
            Complex64::new(self.q.y / s, self.p.y / s),
        ]
    }
}

/// `|z, hbar>(x) = (pi hbar)^{-1/2} exp(-|x - q|^2 / 2 hbar) exp(i p.x / hbar)`.
pub fn coherent_state(z: PhasePoint, hbar: f64, x: Vec2) -> Result<Complex64> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar", format!("must be positive, got {hbar}")));
    }
    let envelope = (-(x - z.q).norm_sq() / (2.0 * hbar)).exp() / (PI * hbar).sqrt();
    Ok(Complex64::from_polar(envelope, z.p.dot(x) / hbar))
}

/// `|<z1|z2>|^2 = exp(-|z1 - z2|^2 / 2 hbar)`.
pub fn overlap_sq(z1: &PhasePoint, z2: &PhasePoint, hbar: f64) -> f64 {
    (-z1.distance_sq(z2) / (2.0 * hbar)).exp()
}

/// `<n|z>` for one axis, `n = 0..=M`:
/// `exp(i q p / 2 hbar) exp(-|alpha|^2 / 2) alpha^n / sqrt(n!)`.
pub fn axis_coefficients(q: f64, p: f64, trunc: &HermiteTruncation) -> Vec<Complex64> {
    let hbar = trunc.hbar();
    let s = (2.0 * hbar).sqrt();
    let alpha = Complex64::new(q / s, p / s);
    let lead = Complex64::from_polar((-0.5 * alpha.norm_sqr()).exp(), q * p / (2.0 * hbar));
    let mut out = Vec::with_capacity(trunc.axis_len());
    let mut c = lead;
    out.push(c);
    for n in 1..trunc.axis_len() {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// `<n1 n2|z>` in the planar basis ordering.
pub fn coherent_coefficients(z: &PhasePoint, trunc: &HermiteTruncation) -> Vec<Complex64> {
    let a = axis_coefficients(z.q.x, z.p.x, trunc);
    let b = axis_coefficients(z.q.y, z.p.y, trunc);
    let mut out = Vec::with_capacity(trunc.basis_size());
    for ai in &a {
        for bi in &b {
            out.push(ai * bi);
        }
    }
    out
}

/// Probability mass of `|z>` outside the truncated basis.
pub fn truncation_loss(z: &PhasePoint, trunc: &HermiteTruncation) -> f64 {
    let kept: f64 = coherent_coefficients(z, trunc).iter().map(|c| c.norm_sqr()).sum();
    (1.0 - kept).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_inner(z1: PhasePoint, z2: PhasePoint, hbar: f64) -> (Complex64, f64) {
        let h = hbar.sqrt() / 10.0;
        let half = 4.0;
        let n = (2.0 * half / h) as usize;
        let mut ip = Complex64::new(0.0, 0.0);
        let mut norm = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = Vec2::new(-half + i as f64 * h, -half + j as f64 * h);
                let a = coherent_state(z1, hbar, x).unwrap();
                let b = coherent_state(z2, hbar, x).unwrap();
                ip += a.conj() * b * h * h;
                norm += a.norm_sqr() * h * h;
            }
        }
        (ip, norm)
    }

    #[test]
    fn normalized_on_the_grid() {
        let z = PhasePoint::new(Vec2::new(0.3, -0.2), Vec2::new(0.5, 0.1)).unwrap();
        let (_, norm) = grid_inner(z, z, 0.1);
        assert!((norm - 1.0).abs() < 1e-8, "{norm}");
    }

    #[test]
    fn overlap_matches_gaussian_integral() {
        let hbar = 0.1;
        let z1 = PhasePoint::new(Vec2::new(0.3, -0.2), Vec2::new(0.5, 0.1)).unwrap();
        let z2 = PhasePoint::new(Vec2::new(-0.1, 0.2), Vec2::new(0.2, -0.3)).unwrap();
        let (ip, _) = grid_inner(z1, z2, hbar);
        let expected = overlap_sq(&z1, &z2, hbar);
        assert!((ip.norm_sqr() - expected).abs() < 1e-6, "{} vs {expected}", ip.norm_sqr());
    }

    #[test]
    fn origin_state_is_real_positive_and_peaked() {
        let z = PhasePoint::origin();
        let c = coherent_state(z, 0.2, Vec2::ZERO).unwrap();
        assert_eq!(c.im, 0.0);
        for x in [Vec2::new(0.1, 0.0), Vec2::new(-0.2, 0.3)] {
            let v = coherent_state(z, 0.2, x).unwrap();
            assert!(v.re > 0.0 && v.im == 0.0 && v.re < c.re);
        }
        assert!(coherent_state(z, 0.0, Vec2::ZERO).is_err());
    }

    #[test]
    fn coefficients_match_projection() {
        let hbar = 0.2;
        let trunc = HermiteTruncation::new(hbar, 6).unwrap();
        let (q, p) = (0.4, -0.3);
        let coeffs = axis_coefficients(q, p, &trunc);
        // <n|z> = int phi_n(x) (pi hbar)^{-1/4} exp(-(x-q)^2/2hbar + i p x/hbar) dx
        let h = 1e-3;
        let mut proj = vec![Complex64::new(0.0, 0.0); 7];
        let mut x = -5.0;
        while x < 5.0 {
            let psi = Complex64::from_polar(
                (PI * hbar).powf(-0.25) * (-(x - q) * (x - q) / (2.0 * hbar)).exp(),
                p * x / hbar,
            );
            for (n, phi) in trunc.axis_functions(x).into_iter().enumerate() {
                proj[n] += psi * phi * h;
            }
            x += h;
        }
        for n in 0..7 {
            assert!((proj[n] - coeffs[n]).norm() < 1e-10, "n {n}");
        }
    }

    #[test]
    fn truncation_loss_shrinks_with_degree() {
        let z = PhasePoint::new(Vec2::new(0.5, 0.0), Vec2::new(0.0, 0.5)).unwrap();
        let small = truncation_loss(&z, &HermiteTruncation::new(0.1, 4).unwrap());
        let large = truncation_loss(&z, &HermiteTruncation::new(0.1, 16).unwrap());
        assert!(large < small && large < 1e-6);
    }
}
