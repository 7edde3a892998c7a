//! Free-space (non-periodic) grid convolution by zero-padded domain doubling.
//!
//! For a grid of `n` nodes per axis the input is embedded in a `2n x 2n`
//! array and the kernel is sampled at every node offset in `[-n, n)`. A
//! circular convolution of the padded arrays then equals the aperiodic sum
//! `h^2 sum_j f_j k(x_i - x_j)` on the original nodes.
//!
//! On the zero offset the Coulomb kernel is replaced by its exact cell
//! average; the antisymmetric kernels (gradient, Biot-Savart) are set to 0.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::potential::{coulomb_cell_average, coulomb_potential_unchecked};
use super::{GridSpec, ScalarGrid, Vec2, VectorGrid};
use crate::error::{invalid, Error, Result};

/// Convolution kernels available on grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `V(x) = -(1/2pi) log|x|`.
    Coulomb,
    /// `grad V`, vector valued.
    CoulombGradient,
    /// `K = -(grad V)^perp`, vector valued.
    BiotSavart,
    /// Centred Gaussian density on the plane with covariance `a I`.
    Gaussian(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Convolved {
    Scalar(ScalarGrid),
    Vector(VectorGrid),
}

impl Convolved {
    pub fn into_scalar(self) -> Option<ScalarGrid> {
        match self {
            Convolved::Scalar(s) => Some(s),
            Convolved::Vector(_) => None,
        }
    }

    pub fn into_vector(self) -> Option<VectorGrid> {
        match self {
            Convolved::Vector(v) => Some(v),
            Convolved::Scalar(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Component {
    Coulomb,
    GradX,
    GradY,
    Gaussian(u64),
}

/// Density of the centred Gaussian with covariance `a I` on the plane.
pub fn gaussian_density(a: f64, r: Vec2) -> f64 {
    (-r.norm_sq() / (2.0 * a)).exp() / (2.0 * PI * a)
}

/// Reusable free-space convolver for one grid layout. Kernel spectra are
/// computed on first use and cached.
pub struct FreeSpaceConvolver {
    spec: GridSpec,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectra: Mutex<HashMap<Component, Arc<Vec<Complex64>>>>,
}

impl std::fmt::Debug for FreeSpaceConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeSpaceConvolver")
            .field("spec", &self.spec)
            .field("size", &self.size)
            .finish()
    }
}

impl FreeSpaceConvolver {
    pub fn new(spec: GridSpec) -> Self {
        let size = 2 * spec.cells();
        let mut planner = FftPlanner::new();
        FreeSpaceConvolver {
            spec,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
            spectra: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn convolve(&self, f: &ScalarGrid, kernel: Kernel) -> Result<Convolved> {
        Ok(match kernel {
            Kernel::Coulomb => Convolved::Scalar(self.potential(f)?),
            Kernel::CoulombGradient => Convolved::Vector(self.gradient(f)?),
            Kernel::BiotSavart => Convolved::Vector(self.biot_savart(f)?),
            Kernel::Gaussian(a) => Convolved::Scalar(self.gaussian(f, a)?),
        })
    }

    /// `V * f`.
    pub fn potential(&self, f: &ScalarGrid) -> Result<ScalarGrid> {
        let fh = self.transform(f)?;
        Ok(self.apply(&fh, Component::Coulomb))
    }

    /// `grad V * f`.
    pub fn gradient(&self, f: &ScalarGrid) -> Result<VectorGrid> {
        let fh = self.transform(f)?;
        let gx = self.apply(&fh, Component::GradX);
        let gy = self.apply(&fh, Component::GradY);
        VectorGrid::from_components(gx, gy)
    }

    /// `K * f` with `K = -(grad V)^perp`, i.e. `(d_y V * f, -d_x V * f)`.
    pub fn biot_savart(&self, f: &ScalarGrid) -> Result<VectorGrid> {
        let fh = self.transform(f)?;
        let gx = self.apply(&fh, Component::GradX);
        let gy = self.apply(&fh, Component::GradY);
        VectorGrid::from_components(gy, gx.scaled(-1.0))
    }

    /// `sum_k d_k V * g^k` for a vector field `g`.
    pub fn gradient_dot(&self, g: &VectorGrid) -> Result<ScalarGrid> {
        let ax = self.apply(&self.transform(&g.x())?, Component::GradX);
        let ay = self.apply(&self.transform(&g.y())?, Component::GradY);
        ax.add_scaled(&ay, 1.0)
    }

    /// `G_a * f`. The heat kernel is positive, so negative round-off from
    /// the transform is clipped to zero. The kernel width must span a cell,
    /// otherwise its sampled mass is wrong.
    pub fn gaussian(&self, f: &ScalarGrid, a: f64) -> Result<ScalarGrid> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid("gaussian variance", format!("must be positive, got {a}")));
        }
        let h = self.spec.spacing();
        if a.sqrt() < h {
            return Err(Error::UnderResolved { spacing: h, required: a.sqrt() });
        }
        let fh = self.transform(f)?;
        let out = self.apply(&fh, Component::Gaussian(a.to_bits()));
        if f.min() >= 0.0 {
            Ok(out.map(|v| v.max(0.0)))
        } else {
            Ok(out)
        }
    }

    fn transform(&self, f: &ScalarGrid) -> Result<Vec<Complex64>> {
        if f.spec() != &self.spec {
            return Err(Error::GridMismatch);
        }
        let n = self.spec.cells();
        let m = self.size;
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        for iy in 0..n {
            for ix in 0..n {
                buf[iy * m + ix] = Complex64::new(f.at(ix, iy), 0.0);
            }
        }
        self.fft2(&mut buf, true);
        Ok(buf)
    }

    fn apply(&self, fh: &[Complex64], component: Component) -> ScalarGrid {
        let kh = self.spectrum(component);
        let m = self.size;
        let n = self.spec.cells();
        let mut buf: Vec<Complex64> = fh.iter().zip(kh.iter()).map(|(a, b)| a * b).collect();
        self.fft2(&mut buf, false);
        let scale = self.spec.cell_area() / (m * m) as f64;
        let mut out = ScalarGrid::zeros(self.spec);
        let data = out.data_mut();
        for iy in 0..n {
            for ix in 0..n {
                data[iy * n + ix] = buf[iy * m + ix].re * scale;
            }
        }
        out
    }

    fn spectrum(&self, component: Component) -> Arc<Vec<Complex64>> {
        if let Some(s) = self.spectra.lock().expect("spectrum cache poisoned").get(&component) {
            return Arc::clone(s);
        }
        let m = self.size;
        let n = self.spec.cells() as isize;
        let h = self.spec.spacing();
        let offset = |k: usize| -> f64 {
            let k = k as isize;
            (if k < n { k } else { k - 2 * n }) as f64 * h
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        buf.par_chunks_mut(m).enumerate().for_each(|(ky, row)| {
            let dy = offset(ky);
            for (kx, cell) in row.iter_mut().enumerate() {
                let r = Vec2::new(offset(kx), dy);
                let r2 = r.norm_sq();
                let v = match component {
                    Component::Coulomb => {
                        if r2 == 0.0 {
                            coulomb_cell_average(h)
                        } else {
                            coulomb_potential_unchecked(r2)
                        }
                    }
                    Component::GradX | Component::GradY if r2 == 0.0 => 0.0,
                    Component::GradX => -r.x / (2.0 * PI * r2),
                    Component::GradY => -r.y / (2.0 * PI * r2),
                    Component::Gaussian(bits) => gaussian_density(f64::from_bits(bits), r),
                };
                *cell = Complex64::new(v, 0.0);
            }
        });
        self.fft2(&mut buf, true);
        let arc = Arc::new(buf);
        self.spectra
            .lock()
            .expect("spectrum cache poisoned")
            .insert(component, Arc::clone(&arc));
        arc
    }

    fn fft2(&self, buf: &mut [Complex64], forward: bool) {
        let m = self.size;
        let plan = if forward { &self.forward } else { &self.inverse };
        buf.par_chunks_mut(m).for_each(|row| plan.process(row));
        let mut t = transpose(buf, m);
        t.par_chunks_mut(m).for_each(|row| plan.process(row));
        let back = transpose(&t, m);
        buf.copy_from_slice(&back);
    }
}

fn transpose(a: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); m * m];
    t.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = a[i * m + j];
        }
    });
    t
}

/// One-shot free-space convolution.
pub fn free_space_convolve(f: &ScalarGrid, kernel: Kernel) -> Result<Convolved> {
    FreeSpaceConvolver::new(*f.spec()).convolve(f, kernel)
}
