use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::kernels::Vec2;

use super::ParticleEnsemble;

/// Proposals allowed before giving up: `max(10^6, 1000 N)`.
pub fn retry_budget(n: usize) -> usize {
    1_000_000usize.max(1000 * n)
}

/// `n` i.i.d. positions from `density` by rejection against its sup on the
/// bounding box.
pub fn sample_positions(density: &dyn Density, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec2>> {
    let (lo, hi) = density.bounding_box();
    let sup = density.sup();
    if !(sup > 0.0 && sup.is_finite()) {
        return Err(Error::SamplingExhausted { attempts: 0 });
    }
    let budget = retry_budget(n);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        if attempts == budget {
            return Err(Error::SamplingExhausted { attempts });
        }
        attempts += 1;
        let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        let v = density.value(p);
        if v < 0.0 {
            return Err(Error::NegativeDensity { point: p });
        }
        if rng.gen::<f64>() * sup < v {
            out.push(p);
        }
    }
    Ok(out)
}

/// How initial positions are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingScheme {
    /// Independent draws by rejection.
    #[default]
    Iid,
    /// Jittered strata of the unit square pushed through the inverse
    /// Rosenblatt map of a piecewise-constant tabulation of the density.
    Stratified,
}

/// Cells per axis of the tabulation used by the stratified sampler.
pub const STRATIFIED_RESOLUTION: usize = 1024;

/// `n` positions, one per jittered stratum of a `k x k` partition of the unit
/// square (`k = ceil(sqrt n)`, strata chosen at random when `n < k^2`),
/// mapped to the density by inverse conditional CDFs. The law of each point
/// is the cell-average approximation of the density at
/// [`STRATIFIED_RESOLUTION`] cells per axis.
pub fn sample_positions_stratified(
    density: &dyn Density,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec2>> {
    let m = STRATIFIED_RESOLUTION;
    let (lo, hi) = density.bounding_box();
    let w = Vec2::new((hi.x - lo.x) / m as f64, (hi.y - lo.y) / m as f64);
    // column-major cumulative masses: cdf[j * (m + 1) + i] over rows of column j
    let mut cdf = vec![0.0; m * (m + 1)];
    let mut col = vec![0.0; m + 1];
    for j in 0..m {
        let x = lo.x + (j as f64 + 0.5) * w.x;
        let base = j * (m + 1);
        for i in 0..m {
            let p = Vec2::new(x, lo.y + (i as f64 + 0.5) * w.y);
            let v = density.value(p);
            if v < 0.0 {
                return Err(Error::NegativeDensity { point: p });
            }
            cdf[base + i + 1] = cdf[base + i] + v;
        }
        col[j + 1] = col[j] + cdf[base + m];
    }
    let total = col[m];
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::SamplingExhausted { attempts: 0 });
    }
    let k = (n as f64).sqrt().ceil() as usize;
    let mut strata: Vec<usize> = if n == k * k {
        (0..n).collect()
    } else {
        sample_indices(rng, k * k, n).into_vec()
    };
    strata.sort_unstable();
    let invert = |cum: &[f64], target: f64| -> (usize, f64) {
        // last index with cum[idx] <= target among cells of positive mass
        let mut idx = cum.partition_point(|&c| c <= target).saturating_sub(1);
        idx = idx.min(cum.len() - 2);
        while cum[idx + 1] <= cum[idx] && idx > 0 {
            idx -= 1;
        }
        let mass = cum[idx + 1] - cum[idx];
        let frac = if mass > 0.0 { ((target - cum[idx]) / mass).clamp(0.0, 1.0) } else { 0.5 };
        (idx, frac)
    };
    let mut out = Vec::with_capacity(n);
    for s in strata {
        let u1 = ((s / k) as f64 + rng.gen::<f64>()) / k as f64;
        let u2 = ((s % k) as f64 + rng.gen::<f64>()) / k as f64;
        let (j, fx) = invert(&col, u1 * total);
        let column = &cdf[j * (m + 1)..(j + 1) * (m + 1)];
        let (i, fy) = invert(column, u2 * column[m]);
        out.push(Vec2::new(lo.x + (j as f64 + fx) * w.x, lo.y + (i as f64 + fy) * w.y));
    }
    Ok(out)
}

pub fn sample_positions_with(
    density: &dyn Density,
    n: usize,
    scheme: SamplingScheme,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec2>> {
    match scheme {
        SamplingScheme::Iid => sample_positions(density, n, rng),
        SamplingScheme::Stratified => sample_positions_stratified(density, n, rng),
    }
}

/// Monokinetic data: `x_i` i.i.d. from `omega0`, `xi_i = u0(x_i)`.
pub fn sample_monokinetic(
    omega0: &dyn Density,
    u0: &(dyn Fn(Vec2) -> Vec2 + Sync),
    n: usize,
    seed: u64,
) -> Result<ParticleEnsemble> {
    sample_monokinetic_with(omega0, u0, n, seed, SamplingScheme::Iid)
}

pub fn sample_monokinetic_with(
    omega0: &dyn Density,
    u0: &(dyn Fn(Vec2) -> Vec2 + Sync),
    n: usize,
    seed: u64,
    scheme: SamplingScheme,
) -> Result<ParticleEnsemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sample_positions_with(omega0, n, scheme, &mut rng)?;
    let xi = x.iter().map(|&p| u0(p)).collect();
    ParticleEnsemble::new(x, xi)
}

/// Rotating-frame data `xi_i = -x_i^perp / 2 eps + theta(x_i)`.
pub fn sample_rotating_frame(
    omega0: &dyn Density,
    theta: &(dyn Fn(Vec2) -> Vec2 + Sync),
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<ParticleEnsemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sample_positions(omega0, n, &mut rng)?;
    let xi = x.iter().map(|&p| theta(p) - p.perp() / (2.0 * eps)).collect();
    ParticleEnsemble::new(x, xi)
}
