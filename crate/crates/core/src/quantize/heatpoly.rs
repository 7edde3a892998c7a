//! Exact Gaussian smoothing of low-degree polynomials.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};

pub const MAX_DEGREE: usize = 6;

/// Polynomial in 2 or 4 real variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Result<Self> {
        if nvars != 2 && nvars != 4 {
            return Err(invalid("nvars", format!("must be 2 or 4, got {nvars}")));
        }
        Ok(Self { nvars, terms: BTreeMap::new() })
    }

    pub fn constant(nvars: usize, c: f64) -> Result<Self> {
        let mut p = Self::zero(nvars)?;
        p.add_term(vec![0; nvars], c)?;
        Ok(p)
    }

    /// Adds `coef * prod x_k^{e_k}`.
    pub fn add_term(&mut self, exponents: Vec<u32>, coef: f64) -> Result<()> {
        if exponents.len() != self.nvars {
            return Err(invalid("exponents", format!("expected {} entries", self.nvars)));
        }
        let degree = exponents.iter().sum::<u32>() as usize;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooHigh { degree, max: MAX_DEGREE });
        }
        *self.terms.entry(exponents).or_insert(0.0) += coef;
        Ok(())
    }

    pub fn with_term(mut self, exponents: &[u32], coef: f64) -> Result<Self> {
        self.add_term(exponents.to_vec(), coef)?;
        Ok(self)
    }

    /// `x_0^2 + x_1^2`.
    pub fn radius_sq(nvars: usize) -> Result<Self> {
        let mut e0 = vec![0; nvars];
        let mut e1 = vec![0; nvars];
        e0[0] = 2;
        e1[1] = 2;
        Self::zero(nvars)?.with_term(&e0, 1.0)?.with_term(&e1, 1.0)
    }

    /// `p . q^perp` with `q = (x_0, x_1)`, `p = (x_2, x_3)`, `q^perp = (-q_1, q_0)`.
    pub fn momentum_dot_perp() -> Self {
        Self::zero(4)
            .and_then(|p| p.with_term(&[0, 1, 1, 0], -1.0))
            .and_then(|p| p.with_term(&[1, 0, 0, 1], 1.0))
            .expect("valid fixed polynomial")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(e, _)| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "point dimension");
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), c * s)).collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Self> {
        if other.nvars != self.nvars {
            return Err(invalid("nvars", "polynomials live in different spaces"));
        }
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += c;
        }
        Ok(out)
    }

    pub fn laplacian(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            for k in 0..self.nvars {
                if e[k] >= 2 {
                    let mut d = e.clone();
                    d[k] -= 2;
                    *terms.entry(d).or_insert(0.0) += c * (e[k] * (e[k] - 1)) as f64;
                }
            }
        }
        Self { nvars: self.nvars, terms }
    }

    /// Largest coefficient difference against `other`.
    pub fn max_coefficient_diff(&self, other: &Polynomial) -> f64 {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let a = self.terms.get(k).copied().unwrap_or(0.0);
                let b = other.terms.get(k).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `G_{hbar/2} * g = sum_n hbar^n / (4^n n!) Laplacian^n g`.
pub fn heat_poly_expansion(g: &Polynomial, hbar: f64) -> Result<Polynomial> {
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar", format!("must be nonnegative, got {hbar}")));
    }
    let degree = g.degree();
    if degree > MAX_DEGREE {
        return Err(Error::DegreeTooHigh { degree, max: MAX_DEGREE });
    }
    let mut out = g.clone();
    let mut term = g.clone();
    let mut factor = 1.0;
    for n in 1..=degree / 2 {
        term = term.laplacian();
        factor *= hbar / (4.0 * n as f64);
        out = out.add(&term.scaled(factor))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gaussian_density, Vec2};

    #[test]
    fn radius_square_gains_hbar() {
        let hbar = 0.3;
        let g = Polynomial::radius_sq(2).unwrap();
        let s = heat_poly_expansion(&g, hbar).unwrap();
        let expected = g.add(&Polynomial::constant(2, hbar).unwrap()).unwrap();
        assert!(s.max_coefficient_diff(&expected) < 1e-15);
    }

    #[test]
    fn constants_and_harmonic_polynomials_are_fixed() {
        let c = Polynomial::constant(4, 2.5).unwrap();
        assert_eq!(heat_poly_expansion(&c, 0.7).unwrap().max_coefficient_diff(&c), 0.0);
        let h = Polynomial::momentum_dot_perp();
        assert!(h.laplacian().degree() == 0 && h.laplacian().eval(&[1.0; 4]) == 0.0);
        assert_eq!(heat_poly_expansion(&h, 0.7).unwrap().max_coefficient_diff(&h), 0.0);
    }

    #[test]
    fn composition_adds_scales() {
        let g = Polynomial::zero(4)
            .unwrap()
            .with_term(&[2, 2, 1, 1], 1.5)
            .unwrap()
            .with_term(&[0, 0, 4, 0], -0.5)
            .unwrap()
            .with_term(&[1, 0, 0, 1], 2.0)
            .unwrap();
        let (h1, h2) = (0.1, 0.25);
        let twice = heat_poly_expansion(&heat_poly_expansion(&g, h1).unwrap(), h2).unwrap();
        let once = heat_poly_expansion(&g, h1 + h2).unwrap();
        assert!(twice.max_coefficient_diff(&once) < 1e-14);
    }

    #[test]
    fn matches_discrete_gaussian_convolution() {
        let hbar = 0.1;
        let a = hbar / 2.0;
        let g = Polynomial::zero(2)
            .unwrap()
            .with_term(&[4, 2], 1.0)
            .unwrap()
            .with_term(&[3, 0], -2.0)
            .unwrap()
            .with_term(&[0, 6], 0.5)
            .unwrap()
            .with_term(&[1, 1], 1.0)
            .unwrap();
        let smooth = heat_poly_expansion(&g, hbar).unwrap();
        let sigma = a.sqrt();
        let h = sigma / 4.0;
        let reach = (10.0 * sigma / h).ceil() as i64;
        let mut worst = 0.0_f64;
        for i in 0..=8 {
            for j in 0..=8 {
                let x = Vec2::new(-2.0 + 0.5 * i as f64, -2.0 + 0.5 * j as f64);
                let mut acc = 0.0;
                for a1 in -reach..=reach {
                    for a2 in -reach..=reach {
                        let y = Vec2::new(a1 as f64 * h, a2 as f64 * h);
                        let v = x - y;
                        acc += gaussian_density(a, y) * g.eval(&[v.x, v.y]) * h * h;
                    }
                }
                worst = worst.max((acc - smooth.eval(&[x.x, x.y])).abs());
            }
        }
        assert!(worst < 1e-8, "{worst:e}");
    }

    #[test]
    fn rejects_high_degree_and_bad_arity() {
        assert!(Polynomial::zero(3).is_err());
        let p = Polynomial::zero(2).unwrap();
        assert!(matches!(p.with_term(&[4, 3], 1.0), Err(Error::DegreeTooHigh { .. })));
    }
}
