//! Probability densities on the plane used as initial vorticity and as
//! sampling targets.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::kernels::{GridSpec, ScalarGrid, Vec2};

/// A bounded, compactly supported probability density.
pub trait Density: Send + Sync {
    fn value(&self, x: Vec2) -> f64;

    /// Axis-aligned box `(lower, upper)` containing the support.
    fn bounding_box(&self) -> (Vec2, Vec2);

    /// An upper bound for `value`, used by rejection sampling.
    fn sup(&self) -> f64;

    fn to_grid(&self, spec: GridSpec) -> ScalarGrid {
        ScalarGrid::from_fn(spec, |p| self.value(p))
    }
}

/// Radial profiles, all normalized to unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `exp(-1 / (1 - r^2/R^2))` inside the disk of radius `R`.
    Bump { radius: f64 },
    /// Gaussian with covariance `a I` cut off at `radius`.
    TruncatedGaussian { variance: f64, radius: f64 },
    /// Constant on the disk.
    UniformDisk { radius: f64 },
    /// `chi G_{1/2}` with `chi` a smooth cutoff equal to 1 on the unit disk
    /// and 0 outside the disk of radius 2.
    CutoffGaussian,
}

impl Profile {
    fn raw(&self, r: f64) -> f64 {
        match *self {
            Profile::Bump { radius } => {
                let s = r / radius;
                if s < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            Profile::TruncatedGaussian { variance, radius } => {
                if r <= radius {
                    (-r * r / (2.0 * variance)).exp() / (2.0 * PI * variance)
                } else {
                    0.0
                }
            }
            Profile::UniformDisk { radius } => {
                if r <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::CutoffGaussian => smooth_cutoff(r) * (-r * r).exp() / PI,
        }
    }

    fn support_radius(&self) -> f64 {
        match *self {
            Profile::Bump { radius }
            | Profile::TruncatedGaussian { radius, .. }
            | Profile::UniformDisk { radius } => radius,
            Profile::CutoffGaussian => 2.0,
        }
    }

    /// Closed forms where available, composite Simpson otherwise.
    fn mass(&self) -> f64 {
        match *self {
            Profile::TruncatedGaussian { variance, radius } => {
                1.0 - (-radius * radius / (2.0 * variance)).exp()
            }
            Profile::UniformDisk { radius } => PI * radius * radius,
            _ => {
                let r_max = self.support_radius();
                simpson(|r| 2.0 * PI * r * self.raw(r), 0.0, r_max, 20_000)
            }
        }
    }
}

/// `1` on `[0, 1]`, `0` on `[2, inf)`, smooth in between.
pub fn smooth_cutoff(r: f64) -> f64 {
    fn s(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = s(2.0 - r);
        a / (a + s(r - 1.0))
    }
}

pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// A radially symmetric density about `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDensity {
    profile: Profile,
    center: Vec2,
    norm: f64,
}

impl RadialDensity {
    pub fn new(profile: Profile, center: Vec2) -> Result<Self> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be positive, got {v}")))
            }
        };
        match profile {
            Profile::Bump { radius } | Profile::UniformDisk { radius } => positive("radius", radius)?,
            Profile::TruncatedGaussian { variance, radius } => {
                positive("variance", variance)?;
                positive("radius", radius)?;
            }
            Profile::CutoffGaussian => {}
        }
        if !center.is_finite() {
            return Err(invalid("center", "must be finite"));
        }
        Ok(RadialDensity { profile, center, norm: 1.0 / profile.mass() })
    }

    pub fn bump(radius: f64) -> Result<Self> {
        Self::new(Profile::Bump { radius }, Vec2::ZERO)
    }

    pub fn truncated_gaussian(variance: f64, radius: f64) -> Result<Self> {
        Self::new(Profile::TruncatedGaussian { variance, radius }, Vec2::ZERO)
    }

    pub fn uniform_disk(radius: f64) -> Result<Self> {
        Self::new(Profile::UniformDisk { radius }, Vec2::ZERO)
    }

    /// `chi G_{1/2} / Lambda` with `Lambda = |chi G_{1/2}|_1`.
    pub fn cutoff_gaussian() -> Self {
        Self::new(Profile::CutoffGaussian, Vec2::ZERO).expect("built-in profile is valid")
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn support_radius(&self) -> f64 {
        self.profile.support_radius()
    }

    pub fn radial_value(&self, r: f64) -> f64 {
        self.norm * self.profile.raw(r)
    }
}

impl Density for RadialDensity {
    fn value(&self, x: Vec2) -> f64 {
        self.radial_value((x - self.center).norm())
    }

    fn bounding_box(&self) -> (Vec2, Vec2) {
        let r = self.support_radius();
        (self.center - Vec2::new(r, r), self.center + Vec2::new(r, r))
    }

    fn sup(&self) -> f64 {
        // Every built-in profile is maximal at the center.
        self.radial_value(0.0)
    }
}

/// A density given by samples on a grid, read back by bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: ScalarGrid,
    sup: f64,
}

impl GridDensity {
    pub fn new(grid: ScalarGrid) -> Result<Self> {
        if grid.min() < 0.0 {
            return Err(invalid("density", "grid values must be nonnegative"));
        }
        let mass = grid.integral();
        if !(mass > 0.0) {
            return Err(invalid("density", "grid has no mass"));
        }
        let grid = grid.scaled(1.0 / mass);
        let sup = grid.max();
        Ok(GridDensity { grid, sup })
    }

    pub fn grid(&self) -> &ScalarGrid {
        &self.grid
    }
}

impl Density for GridDensity {
    fn value(&self, x: Vec2) -> f64 {
        self.grid.interpolate(x).unwrap_or(0.0)
    }

    fn bounding_box(&self) -> (Vec2, Vec2) {
        let spec = self.grid.spec();
        let n = spec.cells();
        (spec.node(0, 0), spec.node(n - 1, n - 1))
    }

    fn sup(&self) -> f64 {
        self.sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_ins_have_unit_mass() {
        let spec = GridSpec::new(2.5, 512).unwrap();
        let densities = [
            RadialDensity::bump(0.8).unwrap(),
            RadialDensity::truncated_gaussian(0.1, 1.0).unwrap(),
            RadialDensity::cutoff_gaussian(),
        ];
        for d in &densities {
            // The truncated Gaussian jumps at its edge, so its grid quadrature is first order.
            let tol = if matches!(d.profile(), Profile::TruncatedGaussian { .. }) { 1e-4 } else { 1e-6 };
            let m = d.to_grid(spec).integral();
            assert!((m - 1.0).abs() < tol, "{:?}: {m}", d.profile());
        }
    }

    #[test]
    fn cutoff_is_smooth_step() {
        assert_eq!(smooth_cutoff(0.5), 1.0);
        assert_eq!(smooth_cutoff(2.5), 0.0);
        assert!((smooth_cutoff(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let c = smooth_cutoff(1.0 + k as f64 / 100.0);
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn sup_bounds_values() {
        let d = RadialDensity::new(Profile::Bump { radius: 0.7 }, Vec2::new(0.2, -0.1)).unwrap();
        for k in 0..50 {
            let p = Vec2::new(-0.5 + k as f64 * 0.03, 0.1);
            assert!(d.value(p) <= d.sup());
        }
        let (lo, hi) = d.bounding_box();
        assert_eq!(d.value(hi + Vec2::new(0.01, 0.0)), 0.0);
        assert!(lo.x < -0.49 && hi.y > 0.59);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialDensity::bump(0.0).is_err());
        assert!(RadialDensity::truncated_gaussian(-1.0, 1.0).is_err());
        let spec = GridSpec::new(1.0, 16).unwrap();
        assert!(GridDensity::new(ScalarGrid::zeros(spec)).is_err());
    }
}
