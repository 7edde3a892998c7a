use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{coulomb_gradient_unchecked, FreeSpaceConvolver, ScalarGrid, Vec2, VectorGrid};
use crate::nbody::pair_potential_sum;

/// Coulomb functionals of `mu_N - mu` for a fixed grid density `mu`, with
/// `V * mu` and `int V mu mu` computed once.
pub struct CoulombFunctional {
    conv: FreeSpaceConvolver,
    mu: ScalarGrid,
    v_mu: ScalarGrid,
    self_energy: f64,
}

impl std::fmt::Debug for CoulombFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoulombFunctional").field("self_energy", &self.self_energy).finish()
    }
}

impl CoulombFunctional {
    pub fn new(mu: &ScalarGrid) -> Result<Self> {
        Self::with_convolver(FreeSpaceConvolver::new(*mu.spec()), mu)
    }

    pub fn with_convolver(conv: FreeSpaceConvolver, mu: &ScalarGrid) -> Result<Self> {
        let v_mu = conv.potential(mu)?;
        let self_energy = v_mu.mul(mu)?.integral();
        Ok(CoulombFunctional { conv, mu: mu.clone(), v_mu, self_energy })
    }

    pub fn mu(&self) -> &ScalarGrid {
        &self.mu
    }

    /// `V * mu` on the grid.
    pub fn potential(&self) -> &ScalarGrid {
        &self.v_mu
    }

    /// `int int V(x - y) mu(x) mu(y)`.
    pub fn self_energy(&self) -> f64 {
        self.self_energy
    }

    /// Grid max of `|mu|`.
    pub fn mu_sup(&self) -> f64 {
        self.mu.max_abs()
    }

    /// `(1/N) sum_i (V * mu)(x_i)`.
    pub fn mean_potential_at(&self, positions: &[Vec2]) -> Result<f64> {
        let vals: Vec<f64> = positions.iter().map(|&x| self.v_mu.interpolate(x)).collect::<Result<_>>()?;
        Ok(vals.iter().sum::<f64>() / positions.len() as f64)
    }

    /// `f_N = (1/N^2) sum_{i != j} V(x_i - x_j) - (2/N) sum_i (V * mu)(x_i) + int V mu mu`.
    pub fn f_n(&self, positions: &[Vec2]) -> Result<f64> {
        let n = positions.len() as f64;
        let cross = self.mean_potential_at(positions)?;
        let pairs = pair_potential_sum(positions)?;
        Ok(pairs / (n * n) - 2.0 * cross + self.self_energy)
    }

    /// `f_N + (1 + |mu|_inf)/N + log N / N`, nonnegative in the continuum.
    pub fn lower_bound_slack(&self, positions: &[Vec2]) -> Result<f64> {
        let n = positions.len() as f64;
        Ok(self.f_n(positions)? + (1.0 + self.mu_sup()) / n + n.ln() / n)
    }

    /// Off-diagonal integral of `(u(x) - u(y)) . grad V(x - y)` against
    /// `(mu_N - mu)^2`; `u` is a grid field read bilinearly at the particles.
    pub fn f_prime_n(&self, positions: &[Vec2], u: &VectorGrid) -> Result<f64> {
        if u.spec() != self.mu.spec() {
            return Err(Error::GridMismatch);
        }
        let n = positions.len() as f64;
        let ui: Vec<Vec2> = positions.iter().map(|&x| u.interpolate(x)).collect::<Result<_>>()?;
        let pairs = commutator_pair_sum(positions, &ui)?;

        // Mixed term: -2 int int k(x, y) dmu_N(x) dmu(y), which expands to
        // +(2/N) sum_i [ (gradV * (u mu))(x_i) - u(x_i) . (gradV * mu)(x_i) ].
        let grad_v_mu = self.conv.gradient(&self.mu)?;
        let u_mu = VectorGrid::from_components(u.x().mul(&self.mu)?, u.y().mul(&self.mu)?)?;
        let grad_v_dot_u_mu = self.conv.gradient_dot(&u_mu)?;
        let mut mixed = 0.0;
        for (&x, &uix) in positions.iter().zip(&ui) {
            mixed += grad_v_dot_u_mu.interpolate(x)? - uix.dot(grad_v_mu.interpolate(x)?);
        }
        mixed *= 2.0 / n;

        let spec = *self.mu.spec();
        let area = spec.cell_area();
        let mut smooth = 0.0;
        for k in 0..spec.len() {
            let m = self.mu.data()[k];
            if m != 0.0 {
                smooth += m * (u.at_flat(k).dot(grad_v_mu.at_flat(k)) - grad_v_dot_u_mu.data()[k]);
            }
        }
        smooth *= area;
        Ok(pairs / (n * n) + mixed + smooth)
    }
}

/// `sum_{i != j} (u_i - u_j) . grad V(x_i - x_j)`, reduced in index order.
pub(crate) fn commutator_pair_sum(positions: &[Vec2], u: &[Vec2]) -> Result<f64> {
    let rows: Vec<Result<f64>> = positions
        .par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut s = 0.0;
            for (j, &xj) in positions.iter().enumerate() {
                if j == i {
                    continue;
                }
                let r = xi - xj;
                let r2 = r.norm_sq();
                if r2 == 0.0 {
                    return Err(Error::Collision { i: i.min(j), j: i.max(j), distance: 0.0, guard: 0.0 });
                }
                s += (u[i] - u[j]).dot(coulomb_gradient_unchecked(r, r2));
            }
            Ok(s)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total)
}

/// `f_N` for a density given on a grid; see [`CoulombFunctional::f_n`].
pub fn f_n(positions: &[Vec2], mu: &ScalarGrid) -> Result<f64> {
    CoulombFunctional::new(mu)?.f_n(positions)
}

/// `f'_N`; see [`CoulombFunctional::f_prime_n`].
pub fn f_prime_n(positions: &[Vec2], mu: &ScalarGrid, u: &VectorGrid) -> Result<f64> {
    CoulombFunctional::new(mu)?.f_prime_n(positions, u)
}

/// `f_N + (1 + |mu|_inf)/N + log N / N`.
pub fn lower_bound_slack(positions: &[Vec2], mu: &ScalarGrid) -> Result<f64> {
    CoulombFunctional::new(mu)?.lower_bound_slack(positions)
}

/// Default quadrature tolerance for the slack: `1e-4 (1 + |mu|_inf)`.
pub fn slack_tolerance(mu: &ScalarGrid) -> f64 {
    1e-4 * (1.0 + mu.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{coulomb_cell_average, coulomb_potential, GridSpec};
    use std::f64::consts::PI;

    fn disk(spec: GridSpec, r: f64) -> ScalarGrid {
        let g = ScalarGrid::from_fn(spec, |p| if p.norm() <= r { 1.0 } else { 0.0 });
        g.scaled(1.0 / g.integral())
    }

    #[test]
    fn single_particle_against_uniform_disk() {
        // Radial integration: (V * mu)(0) = 1/4pi and int V mu mu = 1/8pi.
        let exact = -2.0 / (4.0 * PI) + 1.0 / (8.0 * PI);
        let spec = GridSpec::new(1.5, 512).unwrap();
        let mu = disk(spec, 1.0);
        let got = f_n(&[Vec2::ZERO], &mu).unwrap();
        assert!((got - exact).abs() < 1e-3, "{got} vs {exact}");
        let slack = lower_bound_slack(&[Vec2::ZERO], &mu).unwrap();
        assert!((slack - (got + 1.0 + mu.max_abs())).abs() < 1e-14);
        assert!(slack >= 0.0);
    }

    #[test]
    fn lattice_in_disk_has_nonnegative_slack() {
        let spec = GridSpec::new(1.5, 256).unwrap();
        let mu = disk(spec, 1.0);
        let mut pts = Vec::new();
        let a = 0.1;
        for i in -10..=10 {
            for j in -10..=10 {
                let p = Vec2::new(i as f64 * a + 0.013, j as f64 * a - 0.007);
                if p.norm() < 1.0 {
                    pts.push(p);
                }
            }
        }
        assert!(lower_bound_slack(&pts, &mu).unwrap() >= 0.0);
    }

    #[test]
    fn invariant_under_rotation_and_relabeling() {
        let spec = GridSpec::new(2.0, 256).unwrap();
        let lumpy = |p: Vec2| (-(p - Vec2::new(0.2, 0.1)).norm_sq() / 0.2).exp() * (1.0 + 0.5 * p.x * p.y);
        let mu = ScalarGrid::from_fn(spec, lumpy);
        let mu = mu.scaled(1.0 / mu.integral());
        let pts = vec![Vec2::new(0.1, 0.2), Vec2::new(-0.3, 0.25), Vec2::new(0.4, -0.5), Vec2::new(0.0, -0.1)];
        let base = f_n(&pts, &mu).unwrap();

        // A quarter turn maps interior nodes onto nodes, so rotating the grid
        // data is exact and only round-off remains.
        let n = spec.cells();
        let mut turned = ScalarGrid::zeros(spec);
        for iy in 1..n {
            for ix in 1..n {
                // (x, y) -> (-y, x): node (ix, iy) receives node (iy, n - ix).
                turned.data_mut()[spec.index(ix, iy)] = mu.at(iy, n - ix);
            }
        }
        let rotated: Vec<Vec2> = pts.iter().map(|p| p.perp()).collect();
        assert!((f_n(&rotated, &turned).unwrap() - base).abs() < 1e-6);

        // A generic angle needs resampling; the error is bilinear, O(h^2).
        let radial = ScalarGrid::from_fn(spec, |p| (-(p.norm_sq()) / 0.2).exp() / (0.2 * PI));
        let r0 = f_n(&pts, &radial).unwrap();
        let generic: Vec<Vec2> = pts.iter().map(|p| p.rotate(0.9)).collect();
        let h2 = spec.cell_area();
        assert!((f_n(&generic, &radial).unwrap() - r0).abs() < h2 * (1.0 + radial.max_abs()));

        let mut perm = pts.clone();
        perm.rotate_left(1);
        perm.swap(0, 2);
        assert!((f_n(&perm, &mu).unwrap() - base).abs() < 1e-14);
    }

    #[test]
    fn commutator_vanishes_for_constant_field() {
        let spec = GridSpec::new(2.0, 64).unwrap();
        let mu = ScalarGrid::from_fn(spec, |p| (-(p.norm_sq()) / 0.2).exp() / (0.2 * PI));
        let u = VectorGrid::from_fn(spec, |_| Vec2::new(0.3, -1.2));
        let pts = [Vec2::new(0.1, 0.2), Vec2::new(-0.3, 0.25), Vec2::new(0.4, -0.5)];
        assert!(f_prime_n(&pts, &mu, &u).unwrap().abs() < 1e-12);
    }

    #[test]
    fn commutator_of_two_particles_without_density() {
        let spec = GridSpec::new(2.0, 64).unwrap();
        let mu = ScalarGrid::zeros(spec);
        let u = VectorGrid::from_fn(spec, |p| Vec2::new(p.y, 0.5 * p.x * p.x));
        let (x1, x2) = (Vec2::new(0.3, -0.4), Vec2::new(-0.5, 0.2));
        let u1 = u.interpolate(x1).unwrap();
        let u2 = u.interpolate(x2).unwrap();
        // Both ordered pairs contribute the same value; 1/N^2 = 1/4.
        let by_hand = 2.0 * (u1 - u2).dot(crate::kernels::coulomb_gradient(x1 - x2).unwrap()) / 4.0;
        assert!((f_prime_n(&[x1, x2], &mu, &u).unwrap() - by_hand).abs() < 1e-15);
    }

    #[test]
    fn commutator_matches_brute_force_discrete_measure() {
        // Treat mu as point masses h^2 mu_k at the nodes (diagonal weight 0)
        // and evaluate the off-diagonal double sum literally.
        let spec = GridSpec::new(1.0, 16).unwrap();
        let mu = ScalarGrid::from_fn(spec, |p| (1.0 - p.norm_sq()).max(0.0) * (1.0 + 0.4 * p.x));
        let u = VectorGrid::from_fn(spec, |p| Vec2::new(-p.y + 0.3 * p.x * p.y, p.x * p.x - 0.2 * p.y));
        let pts: Vec<Vec2> = spec_nodes(&spec, &[(3, 4), (11, 6), (7, 12)]);
        let n = pts.len() as f64;
        let area = spec.cell_area();
        let mut atoms: Vec<(Vec2, f64, Vec2)> = pts.iter().map(|&x| (x, 1.0 / n, u.interpolate(x).unwrap())).collect();
        for k in 0..spec.len() {
            atoms.push((spec.node_of(k), -area * mu.data()[k], u.at_flat(k)));
        }
        let mut brute = 0.0;
        for (a, &(x, wx, ux)) in atoms.iter().enumerate() {
            for (b, &(y, wy, uy)) in atoms.iter().enumerate() {
                if a == b || x == y {
                    continue;
                }
                brute += wx * wy * (ux - uy).dot(crate::kernels::coulomb_gradient(x - y).unwrap());
            }
        }
        let got = f_prime_n(&pts, &mu, &u).unwrap();
        assert!((got - brute).abs() < 1e-12 * (1.0 + brute.abs()), "{got} vs {brute}");

        // Same check for f_N, with the cell average on the grid diagonal.
        let mut brute_f = 0.0;
        for (a, &(x, wx, _)) in atoms.iter().enumerate() {
            for (b, &(y, wy, _)) in atoms.iter().enumerate() {
                if a == b {
                    continue;
                }
                let v = if x == y { coulomb_cell_average(spec.spacing()) } else { coulomb_potential(x - y).unwrap() };
                brute_f += wx * wy * v;
            }
        }
        // Grid self-terms carry the cell average in the convolution.
        for k in 0..spec.len() {
            let w = area * mu.data()[k];
            brute_f += w * w * coulomb_cell_average(spec.spacing());
        }
        let got_f = f_n(&pts, &mu).unwrap();
        assert!((got_f - brute_f).abs() < 1e-12 * (1.0 + brute_f.abs()), "{got_f} vs {brute_f}");
    }

    // Particles on nodes, so bilinear reads are exact node values.
    fn spec_nodes(spec: &GridSpec, idx: &[(usize, usize)]) -> Vec<Vec2> {
        idx.iter().map(|&(i, j)| spec.node(i, j)).collect()
    }
}
