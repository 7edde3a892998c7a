use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::Density;
use crate::error::{invalid, Error, Result};
use crate::kernels::{ScalarGrid, Vec2};
use crate::nbody::sample_monokinetic;

use super::CoulombFunctional;

/// Test functions for weak convergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `exp(-|x|^2)`.
    Phi1,
    /// `x_1 exp(-|x|^2)`.
    Phi2,
    Constant(f64),
    /// The coordinate `x_k`, `k` in `{0, 1}`.
    Coordinate(usize),
}

impl TestFunction {
    pub fn value(&self, x: Vec2) -> f64 {
        match *self {
            TestFunction::Phi1 => (-x.norm_sq()).exp(),
            TestFunction::Phi2 => x.x * (-x.norm_sq()).exp(),
            TestFunction::Constant(c) => c,
            TestFunction::Coordinate(0) => x.x,
            TestFunction::Coordinate(_) => x.y,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Phi1 => "phi1".into(),
            TestFunction::Phi2 => "phi2".into(),
            TestFunction::Constant(c) => format!("const({c})"),
            TestFunction::Coordinate(k) => format!("x{}", k + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityReport {
    pub test_function: String,
    /// `|int phi d(mu_N - mu)|`.
    pub lhs: f64,
    /// Grid surrogate of `|phi|_{C^{0,1}}`: max value plus max gradient.
    pub lipschitz_norm: f64,
    /// Grid surrogate of `|phi|_{H^1}`: L^2 norm of the grid gradient.
    pub h1_seminorm: f64,
    pub slack: f64,
    /// `h1_seminorm * sqrt(max(slack, 0))`.
    pub slack_term: f64,
}

pub fn coercivity_check(phi: TestFunction, positions: &[Vec2], functional: &CoulombFunctional) -> Result<CoercivityReport> {
    let mu = functional.mu();
    let phi_grid = ScalarGrid::from_fn(*mu.spec(), |p| phi.value(p));
    if phi_grid.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: format!("test function {}", phi.name()) });
    }
    let n = positions.len() as f64;
    let empirical = positions.iter().map(|&x| phi.value(x)).sum::<f64>() / n;
    let lhs = (empirical - phi_grid.dot(mu)?).abs();
    let grad = phi_grid.gradient();
    let lipschitz_norm = phi_grid.max_abs() + grad.max_norm();
    let h1_seminorm = (grad.x().dot(&grad.x())? + grad.y().dot(&grad.y())?).sqrt();
    let slack = functional.lower_bound_slack(positions)?;
    Ok(CoercivityReport {
        test_function: phi.name(),
        lhs,
        lipschitz_norm,
        h1_seminorm,
        slack,
        slack_term: h1_seminorm * slack.max(0.0).sqrt(),
    })
}

/// Seed for stream `index` derived from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityRow {
    pub n: usize,
    pub test_function: String,
    pub median_lhs: f64,
    pub median_slack: f64,
    pub lhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoercivitySweep {
    pub rows: Vec<CoercivityRow>,
    /// Per test function, `lambda = -2 d log(median LHS) / d log N`.
    pub fitted_lambda: Vec<(String, f64)>,
}

/// i.i.d. samples of `density` for each `N` and seed; medians of the LHS.
pub fn coercivity_sweep(
    density: &dyn Density,
    functional: &CoulombFunctional,
    phis: &[TestFunction],
    ns: &[usize],
    seeds: usize,
    master_seed: u64,
) -> Result<CoercivitySweep> {
    if seeds == 0 || ns.is_empty() || phis.is_empty() {
        return Err(invalid("sweep", "needs at least one N, seed and test function"));
    }
    let mut rows = Vec::new();
    for (a, &n) in ns.iter().enumerate() {
        let mut per_phi: Vec<Vec<f64>> = vec![Vec::new(); phis.len()];
        let mut slacks = Vec::new();
        for s in 0..seeds {
            let seed = derive_seed(master_seed, (a * seeds + s) as u64);
            let e = sample_monokinetic(density, &|_| Vec2::ZERO, n, seed)?;
            for (k, &phi) in phis.iter().enumerate() {
                let r = coercivity_check(phi, e.positions(), functional)?;
                if k == 0 {
                    slacks.push(r.slack);
                }
                per_phi[k].push(r.lhs);
            }
        }
        for (k, phi) in phis.iter().enumerate() {
            rows.push(CoercivityRow {
                n,
                test_function: phi.name(),
                median_lhs: median(&per_phi[k]),
                median_slack: median(&slacks),
                lhs: per_phi[k].clone(),
            });
        }
    }
    let fitted_lambda = phis
        .iter()
        .map(|phi| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.test_function == phi.name())
                .map(|r| (r.n as f64, r.median_lhs))
                .collect();
            (phi.name(), -2.0 * log_log_slope(&pts))
        })
        .collect();
    Ok(CoercivitySweep { rows, fitted_lambda })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m == 0 {
        f64::NAN
    } else if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::RadialDensity;
    use crate::kernels::GridSpec;

    #[test]
    fn constant_test_function_sees_nothing() {
        let spec = GridSpec::new(2.0, 128).unwrap();
        let d = RadialDensity::bump(1.0).unwrap();
        let mu = d.to_grid(spec);
        let mu = mu.scaled(1.0 / mu.integral());
        let f = CoulombFunctional::new(&mu).unwrap();
        let e = sample_monokinetic(&d, &|_| Vec2::ZERO, 50, 1).unwrap();
        let r = coercivity_check(TestFunction::Constant(2.5), e.positions(), &f).unwrap();
        assert!(r.lhs < 1e-13);
        assert_eq!(r.h1_seminorm, 0.0);
    }

    #[test]
    fn quadrature_points_of_uniform_square() {
        let spec = GridSpec::new(1.0, 128).unwrap();
        let mu = ScalarGrid::from_fn(spec, |p| if p.x.abs() < 0.5 && p.y.abs() < 0.5 { 1.0 } else { 0.0 });
        let mu = mu.scaled(1.0 / mu.integral());
        let f = CoulombFunctional::new(&mu).unwrap();
        let m = 20;
        let pts: Vec<Vec2> = (0..m * m)
            .map(|k| Vec2::new(-0.5 + ((k % m) as f64 + 0.5) / m as f64, -0.5 + ((k / m) as f64 + 0.5) / m as f64))
            .collect();
        let r = coercivity_check(TestFunction::Coordinate(0), &pts, &f).unwrap();
        assert!(r.lhs < 1e-3);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [64.0, 256.0, 1024.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(-0.5))).collect();
        assert!((log_log_slope(&pts) + 0.5).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_eq!(derive_seed(9, 4), derive_seed(9, 4));
    }
}
