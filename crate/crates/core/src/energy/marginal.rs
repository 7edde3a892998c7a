use crate::error::{invalid, Error, Result};
use crate::kernels::{ScalarGrid, Vec2};

/// A finitely supported probability measure on `(R^2)^N`: configurations
/// with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationMixture {
    configs: Vec<Vec<Vec2>>,
    weights: Vec<f64>,
}

impl ConfigurationMixture {
    /// Checks normalization and permutation symmetry. Symmetry is tested by
    /// closure under adjacent transpositions, which generate all
    /// permutations.
    pub fn new(configs: Vec<Vec<Vec2>>, weights: Vec<f64>) -> Result<Self> {
        if configs.is_empty() || configs.len() != weights.len() {
            return Err(invalid("weights", "one weight per configuration, at least one configuration"));
        }
        let n = configs[0].len();
        if n == 0 || configs.iter().any(|c| c.len() != n) {
            return Err(invalid("configs", "configurations must share a positive particle count"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(invalid("weights", "must be nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::WeightsNotNormalized { sum });
        }
        for (c, &w) in configs.iter().zip(&weights) {
            for k in 0..n.saturating_sub(1) {
                let mut swapped = c.clone();
                swapped.swap(k, k + 1);
                let mass: f64 = configs
                    .iter()
                    .zip(&weights)
                    .filter(|(d, _)| **d == swapped)
                    .map(|(_, &v)| v)
                    .sum();
                let own: f64 = configs.iter().zip(&weights).filter(|(d, _)| *d == c).map(|(_, &v)| v).sum();
                if (mass - own).abs() > 1e-14 * (1.0 + w) {
                    return Err(Error::AsymmetricMixture {
                        reason: format!("swapping particles {k} and {} changes the weight", k + 1),
                    });
                }
            }
        }
        Ok(ConfigurationMixture { configs, weights })
    }

    /// Uniform mixture over all orderings of `base` (`N!` configurations).
    pub fn symmetrized(base: &[Vec2]) -> Result<Self> {
        if base.len() > 8 {
            return Err(invalid("N", "symmetrization enumerates N! orderings; N <= 8"));
        }
        let mut configs = Vec::new();
        permutations(&mut base.to_vec(), 0, &mut configs);
        let w = 1.0 / configs.len() as f64;
        let weights = vec![w; configs.len()];
        Self::new(configs, weights)
    }

    /// Weighted union of symmetric mixtures.
    pub fn combine(parts: &[(f64, ConfigurationMixture)]) -> Result<Self> {
        let mut configs = Vec::new();
        let mut weights = Vec::new();
        for (a, m) in parts {
            configs.extend(m.configs.iter().cloned());
            weights.extend(m.weights.iter().map(|w| a * w));
        }
        Self::new(configs, weights)
    }

    pub fn particles(&self) -> usize {
        self.configs[0].len()
    }

    pub fn configs(&self) -> &[Vec<Vec2>] {
        &self.configs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn permutations(v: &mut Vec<Vec2>, k: usize, out: &mut Vec<Vec<Vec2>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Both sides of
/// `int phi (rho_{N:1} - mu) = (1/N) E_rho[ sum_i phi(x_i) - N int phi mu ]`.
pub fn marginal_identity_check(
    rho: &ConfigurationMixture,
    mu: &ScalarGrid,
    phi: impl Fn(Vec2) -> f64,
) -> (f64, f64) {
    let n = rho.particles() as f64;
    let phi_mu = mu.integrate_against(&phi);
    let first_marginal: f64 = rho.configs.iter().zip(&rho.weights).map(|(c, w)| w * phi(c[0])).sum();
    let lhs = first_marginal - phi_mu;
    let rhs: f64 = rho
        .configs
        .iter()
        .zip(&rho.weights)
        .map(|(c, w)| w * (c.iter().map(|&x| phi(x)).sum::<f64>() - n * phi_mu))
        .sum::<f64>()
        / n;
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::GridSpec;

    fn mu() -> ScalarGrid {
        let spec = GridSpec::new(1.0, 32).unwrap();
        let g = ScalarGrid::from_fn(spec, |p| (-(p.norm_sq()) * 4.0).exp());
        g.scaled(1.0 / g.integral())
    }

    #[test]
    fn deterministic_configuration() {
        // A single configuration is symmetric only if all its points agree.
        let x = Vec2::new(0.2, -0.1);
        let rho = ConfigurationMixture::new(vec![vec![x, x, x]], vec![1.0]).unwrap();
        let phi = |p: Vec2| (p.x * 3.0).sin() + p.y;
        let (l, r) = marginal_identity_check(&rho, &mu(), phi);
        let expected = phi(x) - mu().integrate_against(phi);
        assert!((l - expected).abs() < 1e-14 && (r - expected).abs() < 1e-14);
    }

    #[test]
    fn two_particle_mixture_by_enumeration() {
        let (a, b) = (Vec2::new(0.1, 0.2), Vec2::new(-0.4, 0.3));
        let rho = ConfigurationMixture::new(vec![vec![a, b], vec![b, a]], vec![0.5, 0.5]).unwrap();
        let phi = |p: Vec2| p.x * p.x - p.y;
        let m = mu();
        let (l, r) = marginal_identity_check(&rho, &m, phi);
        let expected = 0.5 * (phi(a) + phi(b)) - m.integrate_against(phi);
        assert!((l - expected).abs() < 1e-15);
        assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn zero_test_function() {
        let rho = ConfigurationMixture::symmetrized(&[Vec2::new(0.1, 0.0), Vec2::new(0.0, 0.3), Vec2::ZERO]).unwrap();
        assert_eq!(marginal_identity_check(&rho, &mu(), |_| 0.0), (0.0, 0.0));
        assert_eq!(rho.configs().len(), 6);
    }

    #[test]
    fn rejects_bad_mixtures() {
        let (a, b) = (Vec2::new(0.1, 0.2), Vec2::new(-0.4, 0.3));
        assert!(matches!(
            ConfigurationMixture::new(vec![vec![a, b], vec![b, a]], vec![0.7, 0.3]),
            Err(Error::AsymmetricMixture { .. })
        ));
        assert!(matches!(
            ConfigurationMixture::new(vec![vec![a, b], vec![b, a]], vec![0.5, 0.6]),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }
}
