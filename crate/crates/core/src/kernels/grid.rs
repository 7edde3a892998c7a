//! Uniform node grids on the square `[-L, L]^2`.
//!
//! Node `(ix, iy)` sits at `(-L + ix h, -L + iy h)` with `h = 2L / n`, so the
//! origin is node `(n/2, n/2)`. Each node carries a cell of area `h^2` for
//! quadrature. Storage is row-major with `x` varying fastest.

use super::Vec2;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    cells: usize,
}

impl GridSpec {
    pub const MIN_CELLS: usize = 16;

    pub fn new(half_width: f64, cells: usize) -> Result<Self> {
        if cells < Self::MIN_CELLS || cells % 2 != 0 {
            return Err(Error::GridTooSmall { cells });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", format!("must be positive, got {half_width}")));
        }
        Ok(GridSpec { half_width, cells })
    }

    /// Default for vorticity supported in the unit disk.
    pub fn default_euler() -> Self {
        GridSpec {
            half_width: 2.0,
            cells: 256,
        }
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells * self.cells
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    #[inline]
    pub fn node(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(self.coord(ix), self.coord(iy))
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.cells + ix
    }

    /// Node position of flat index `k`.
    #[inline]
    pub fn node_of(&self, k: usize) -> Vec2 {
        self.node(k % self.cells, k / self.cells)
    }

    /// Grid with the same extent and twice the resolution.
    pub fn refined(&self) -> Self {
        GridSpec {
            half_width: self.half_width,
            cells: 2 * self.cells,
        }
    }

    /// Whether `p` lies in the bilinear-interpolation region (the convex hull
    /// of the nodes).
    pub fn contains(&self, p: Vec2) -> bool {
        let hi = self.coord(self.cells - 1);
        p.x >= -self.half_width && p.y >= -self.half_width && p.x <= hi && p.y <= hi
    }

    /// Lower-left node and fractional offsets for bilinear interpolation.
    pub(crate) fn locate(&self, p: Vec2) -> Result<(usize, usize, f64, f64)> {
        if !self.contains(p) {
            return Err(Error::OffGrid { point: p });
        }
        let h = self.spacing();
        let last = self.cells - 2;
        let fx = (p.x + self.half_width) / h;
        let fy = (p.y + self.half_width) / h;
        let ix = (fx.floor() as usize).min(last);
        let iy = (fy.floor() as usize).min(last);
        Ok((ix, iy, fx - ix as f64, fy - iy as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    spec: GridSpec,
    data: Vec<f64>,
}

impl ScalarGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        ScalarGrid {
            spec,
            data: vec![0.0; spec.len()],
        }
    }

    pub fn from_vec(spec: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.len() {
            return Err(Error::GridMismatch);
        }
        Ok(ScalarGrid { spec, data })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(Vec2) -> f64) -> Self {
        let data = (0..spec.len()).map(|k| f(spec.node_of(k))).collect();
        ScalarGrid { spec, data }
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[self.spec.index(ix, iy)]
    }

    /// `h^2` times the sum of node values.
    pub fn integral(&self) -> f64 {
        self.spec.cell_area() * self.data.iter().sum::<f64>()
    }

    /// Quadrature of `f(x) * self(x)`.
    pub fn integrate_against(&self, f: impl Fn(Vec2) -> f64) -> f64 {
        let s: f64 = self
            .data
            .iter()
            .enumerate()
            .map(|(k, &v)| v * f(self.spec.node_of(k)))
            .sum();
        self.spec.cell_area() * s
    }

    pub fn dot(&self, other: &ScalarGrid) -> Result<f64> {
        self.check_same(other)?;
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        Ok(self.spec.cell_area() * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn l1_norm(&self) -> f64 {
        self.spec.cell_area() * self.data.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.spec.cell_area() * self.data.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn l1_distance(&self, other: &ScalarGrid) -> Result<f64> {
        self.check_same(other)?;
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).sum();
        Ok(self.spec.cell_area() * s)
    }

    pub fn max_abs_diff(&self, other: &ScalarGrid) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarGrid {
        ScalarGrid {
            spec: self.spec,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> ScalarGrid {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &ScalarGrid, s: f64) -> Result<ScalarGrid> {
        self.check_same(other)?;
        Ok(ScalarGrid {
            spec: self.spec,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        })
    }

    pub fn mul(&self, other: &ScalarGrid) -> Result<ScalarGrid> {
        self.check_same(other)?;
        Ok(ScalarGrid {
            spec: self.spec,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn interpolate(&self, p: Vec2) -> Result<f64> {
        let (ix, iy, tx, ty) = self.spec.locate(p)?;
        Ok(bilinear(&self.data, &self.spec, ix, iy, tx, ty))
    }

    /// Centred-difference gradient; second-order one-sided stencils on the
    /// boundary rows and columns.
    pub fn gradient(&self) -> VectorGrid {
        let n = self.spec.cells;
        let h = self.spec.spacing();
        let mut gx = vec![0.0; n * n];
        let mut gy = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                let k = self.spec.index(ix, iy);
                gx[k] = diff(|i| self.data[self.spec.index(i, iy)], ix, n, h);
                gy[k] = diff(|i| self.data[self.spec.index(ix, i)], iy, n, h);
            }
        }
        VectorGrid {
            spec: self.spec,
            x: gx,
            y: gy,
        }
    }

    /// Five-point Laplacian on interior nodes; boundary nodes are zero.
    pub fn laplacian(&self) -> ScalarGrid {
        let n = self.spec.cells;
        let h2 = self.spec.cell_area();
        let mut out = ScalarGrid::zeros(self.spec);
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let c = self.at(ix, iy);
                let s = self.at(ix + 1, iy) + self.at(ix - 1, iy) + self.at(ix, iy + 1)
                    + self.at(ix, iy - 1)
                    - 4.0 * c;
                out.data[self.spec.index(ix, iy)] = s / h2;
            }
        }
        out
    }

    fn check_same(&self, other: &ScalarGrid) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

#[inline]
fn bilinear(data: &[f64], spec: &GridSpec, ix: usize, iy: usize, tx: f64, ty: f64) -> f64 {
    let f00 = data[spec.index(ix, iy)];
    let f10 = data[spec.index(ix + 1, iy)];
    let f01 = data[spec.index(ix, iy + 1)];
    let f11 = data[spec.index(ix + 1, iy + 1)];
    (1.0 - ty) * ((1.0 - tx) * f00 + tx * f10) + ty * ((1.0 - tx) * f01 + tx * f11)
}

#[inline]
fn diff(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    if i == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else {
        (f(i + 1) - f(i - 1)) / (2.0 * h)
    }
}

/// Two-component field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGrid {
    spec: GridSpec,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        VectorGrid {
            spec,
            x: vec![0.0; spec.len()],
            y: vec![0.0; spec.len()],
        }
    }

    pub fn from_components(x: ScalarGrid, y: ScalarGrid) -> Result<Self> {
        if x.spec != y.spec {
            return Err(Error::GridMismatch);
        }
        Ok(VectorGrid {
            spec: x.spec,
            x: x.data,
            y: y.data,
        })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(Vec2) -> Vec2) -> Self {
        let (x, y) = (0..spec.len()).map(|k| f(spec.node_of(k))).map(|v| (v.x, v.y)).unzip();
        VectorGrid { spec, x, y }
    }

    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn x(&self) -> ScalarGrid {
        ScalarGrid {
            spec: self.spec,
            data: self.x.clone(),
        }
    }

    pub fn y(&self) -> ScalarGrid {
        ScalarGrid {
            spec: self.spec,
            data: self.y.clone(),
        }
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Vec2 {
        let k = self.spec.index(ix, iy);
        Vec2::new(self.x[k], self.y[k])
    }

    #[inline]
    pub fn at_flat(&self, k: usize) -> Vec2 {
        Vec2::new(self.x[k], self.y[k])
    }

    pub fn interpolate(&self, p: Vec2) -> Result<Vec2> {
        let (ix, iy, tx, ty) = self.spec.locate(p)?;
        Ok(Vec2::new(
            bilinear(&self.x, &self.spec, ix, iy, tx, ty),
            bilinear(&self.y, &self.spec, ix, iy, tx, ty),
        ))
    }

    /// Pointwise quarter turn.
    pub fn perp(&self) -> VectorGrid {
        VectorGrid {
            spec: self.spec,
            x: self.y.iter().map(|v| -v).collect(),
            y: self.x.clone(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.y)
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// Centred-difference divergence.
    pub fn divergence(&self) -> ScalarGrid {
        let g = self.jacobian();
        let data = (0..self.spec.len()).map(|k| g.d[0][0][k] + g.d[1][1][k]).collect();
        ScalarGrid {
            spec: self.spec,
            data,
        }
    }

    /// Centred-difference Jacobian, `d[i][j] = d_i u^j`.
    pub fn jacobian(&self) -> TensorGrid {
        let gx = self.x().gradient();
        let gy = self.y().gradient();
        TensorGrid {
            spec: self.spec,
            d: [[gx.x, gy.x], [gx.y, gy.y]],
        }
    }
}

/// Velocity gradient on a grid: `d[i][j]` holds `d u^j / d x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    spec: GridSpec,
    d: [[Vec<f64>; 2]; 2],
}

impl TensorGrid {
    #[inline]
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// `d u^j / d x_i` as a scalar grid.
    pub fn component(&self, i: usize, j: usize) -> ScalarGrid {
        ScalarGrid {
            spec: self.spec,
            data: self.d[i][j].clone(),
        }
    }

    #[inline]
    pub fn at_flat(&self, k: usize) -> [[f64; 2]; 2] {
        [
            [self.d[0][0][k], self.d[0][1][k]],
            [self.d[1][0][k], self.d[1][1][k]],
        ]
    }

    /// `sum_{i,j} d_i u^j d_j u^i`.
    pub fn contraction(&self) -> ScalarGrid {
        let data = (0..self.spec.len())
            .map(|k| {
                let a = self.at_flat(k);
                a[0][0] * a[0][0] + a[0][1] * a[1][0] + a[1][0] * a[0][1] + a[1][1] * a[1][1]
            })
            .collect();
        ScalarGrid {
            spec: self.spec,
            data,
        }
    }

    pub fn determinant(&self) -> ScalarGrid {
        let data = (0..self.spec.len())
            .map(|k| {
                let a = self.at_flat(k);
                a[0][0] * a[1][1] - a[0][1] * a[1][0]
            })
            .collect();
        ScalarGrid {
            spec: self.spec,
            data,
        }
    }

    /// Pointwise Frobenius norm.
    pub fn frobenius(&self) -> ScalarGrid {
        let data = (0..self.spec.len())
            .map(|k| {
                let a = self.at_flat(k);
                (a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1])
                    .sqrt()
            })
            .collect();
        ScalarGrid {
            spec: self.spec,
            data,
        }
    }
}
