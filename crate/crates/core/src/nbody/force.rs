use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernels::Vec2;

/// How pairwise forces are summed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ForceMethod {
    /// Direct `O(N^2)` summation in fixed pair order.
    #[default]
    Direct,
    /// Monopole quadtree; a cell of width `w` at distance `d` is summarized
    /// by its centre of mass when `w / d < theta`.
    BarnesHut { theta: f64 },
}

/// Forces together with the smallest pair separation met while summing.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceEval {
    pub forces: Vec<Vec2>,
    pub min_separation: f64,
}

/// `F_i = (1/N) sum_{j != i} grad V(x_i - x_j)`. Any pair closer than
/// `guard` aborts with a collision error naming the pair.
pub fn mean_field_force(positions: &[Vec2], guard: f64) -> Result<ForceEval> {
    mean_field_force_with(positions, guard, ForceMethod::Direct)
}

pub fn mean_field_force_with(positions: &[Vec2], guard: f64, method: ForceMethod) -> Result<ForceEval> {
    if !(guard >= 0.0) {
        return Err(invalid("guard", "minimum separation must be nonnegative"));
    }
    match method {
        ForceMethod::Direct => direct(positions, guard),
        ForceMethod::BarnesHut { theta } => {
            if !(theta > 0.0 && theta < 2.0) {
                return Err(invalid("theta", format!("must lie in (0, 2), got {theta}")));
            }
            barnes_hut(positions, guard, theta)
        }
    }
}

/// Force sum `-sum_j (x - y_j) / |x - y_j|^2` over `ys`, with the smallest
/// squared distance met. Four independent lanes so the loop vectorizes.
fn row_force(x: Vec2, ys: &[Vec2]) -> (f64, f64, f64) {
    let mut fx = [0.0; 4];
    let mut fy = [0.0; 4];
    let mut m = [f64::INFINITY; 4];
    let chunks = ys.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for k in 0..4 {
            let dx = x.x - c[k].x;
            let dy = x.y - c[k].y;
            let r2 = dx * dx + dy * dy;
            m[k] = m[k].min(r2);
            let w = 1.0 / r2;
            fx[k] -= dx * w;
            fy[k] -= dy * w;
        }
    }
    for (k, y) in rest.iter().enumerate() {
        let dx = x.x - y.x;
        let dy = x.y - y.y;
        let r2 = dx * dx + dy * dy;
        m[k] = m[k].min(r2);
        fx[k] -= dx / r2;
        fy[k] -= dy / r2;
    }
    (
        (fx[0] + fx[1]) + (fx[2] + fx[3]),
        (fy[0] + fy[1]) + (fy[2] + fy[3]),
        m[0].min(m[1]).min(m[2].min(m[3])),
    )
}

fn direct(positions: &[Vec2], guard: f64) -> Result<ForceEval> {
    let n = positions.len();
    let scale = 1.0 / (2.0 * PI * n as f64);
    let per: Vec<(Vec2, f64)> = positions
        .par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let (ax, ay, am) = row_force(xi, &positions[..i]);
            let (bx, by, bm) = row_force(xi, &positions[i + 1..]);
            (Vec2::new((ax + bx) * scale, (ay + by) * scale), am.min(bm))
        })
        .collect();
    finish(positions, per, guard * guard)
}

fn finish(positions: &[Vec2], per: Vec<(Vec2, f64)>, guard2: f64) -> Result<ForceEval> {
    let min2 = per.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min);
    if min2 < guard2 || min2 == 0.0 {
        let (_, i, j) = min_separation(positions);
        return Err(Error::Collision { i, j, distance: min2.sqrt(), guard: guard2.sqrt() });
    }
    Ok(ForceEval { forces: per.into_iter().map(|(f, _)| f).collect(), min_separation: min2.sqrt() })
}

fn row_min2(x: Vec2, ys: &[Vec2]) -> f64 {
    let mut m = [f64::INFINITY; 4];
    let chunks = ys.chunks_exact(4);
    let rest = chunks.remainder();
    for c in chunks {
        for k in 0..4 {
            m[k] = m[k].min((x - c[k]).norm_sq());
        }
    }
    for (k, y) in rest.iter().enumerate() {
        m[k] = m[k].min((x - *y).norm_sq());
    }
    m[0].min(m[1]).min(m[2].min(m[3]))
}

/// Smallest pairwise distance, with the pair attaining it.
pub fn min_separation(positions: &[Vec2]) -> (f64, usize, usize) {
    let rows: Vec<f64> = positions.par_iter().enumerate().map(|(i, &xi)| row_min2(xi, &positions[i + 1..])).collect();
    let Some((i, &m)) = rows.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) else {
        return (f64::INFINITY, 0, 0);
    };
    if !m.is_finite() {
        return (f64::INFINITY, 0, 0);
    }
    let j = (i + 1..positions.len()).find(|&j| (positions[i] - positions[j]).norm_sq() == m).unwrap_or(i);
    (m.sqrt(), i, j)
}

/// Products of this many squared distances stay inside the normal range
/// whenever every factor lies in `[1e-30, 1e30]`.
const LOG_RUN: usize = 8;

/// `sum_j ln |x - y_j|^2`, one logarithm per run of `LOG_RUN` factors.
/// `None` on a coincident pair.
fn row_log_sum(x: Vec2, ys: &[Vec2]) -> Option<f64> {
    let mut s = 0.0;
    for run in ys.chunks(LOG_RUN) {
        let mut prod = 1.0;
        let mut safe = true;
        for y in run {
            let r2 = (x - *y).norm_sq();
            safe &= (1e-30..=1e30).contains(&r2);
            prod *= r2;
        }
        if safe {
            s += prod.ln();
        } else {
            for y in run {
                let r2 = (x - *y).norm_sq();
                if r2 == 0.0 {
                    return None;
                }
                s += r2.ln();
            }
        }
    }
    Some(s)
}

/// `sum_{i != j} V(x_i - x_j)` over ordered pairs, as twice the unordered
/// sum reduced in index order.
pub fn pair_potential_sum(positions: &[Vec2]) -> Result<f64> {
    let rows: Vec<Option<f64>> =
        positions.par_iter().enumerate().map(|(i, &xi)| row_log_sum(xi, &positions[i + 1..])).collect();
    let mut total = 0.0;
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Some(v) => total += v,
            None => {
                let j = (i + 1..positions.len()).find(|&j| positions[i] == positions[j]).unwrap_or(i);
                return Err(Error::Collision { i, j, distance: 0.0, guard: 0.0 });
            }
        }
    }
    // V(r) = -ln(r^2) / 4pi
    Ok(-2.0 * total / (4.0 * PI))
}

struct Cell {
    half: f64,
    mass: f64,
    com: Vec2,
    children: Option<[usize; 4]>,
    bodies: Vec<usize>,
}

struct QuadTree {
    cells: Vec<Cell>,
}

const LEAF_CAPACITY: usize = 8;
const MAX_DEPTH: usize = 48;

impl QuadTree {
    fn build(positions: &[Vec2]) -> Self {
        let (mut lo, mut hi) = (positions[0], positions[0]);
        for p in positions {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let center = (lo + hi) * 0.5;
        let half = 0.5 * (hi.x - lo.x).max(hi.y - lo.y) * (1.0 + 1e-12) + 1e-300;
        let mut tree = QuadTree { cells: Vec::new() };
        tree.insert(positions, center, half, (0..positions.len()).collect(), 0);
        tree
    }

    fn insert(&mut self, positions: &[Vec2], center: Vec2, half: f64, bodies: Vec<usize>, depth: usize) -> usize {
        let id = self.cells.len();
        let mut com = Vec2::ZERO;
        for &b in &bodies {
            com += positions[b];
        }
        let mass = bodies.len() as f64;
        com = com / mass;
        self.cells.push(Cell { half, mass, com, children: None, bodies: Vec::new() });
        if bodies.len() <= LEAF_CAPACITY || depth >= MAX_DEPTH {
            self.cells[id].bodies = bodies;
            return id;
        }
        let mut quads: [Vec<usize>; 4] = Default::default();
        for b in bodies {
            let p = positions[b];
            let q = usize::from(p.x >= center.x) + 2 * usize::from(p.y >= center.y);
            quads[q].push(b);
        }
        let h = 0.5 * half;
        let mut children = [usize::MAX; 4];
        for (q, list) in quads.into_iter().enumerate() {
            let c = center + Vec2::new(if q & 1 == 1 { h } else { -h }, if q & 2 == 2 { h } else { -h });
            children[q] = self.insert(positions, c, h, list, depth + 1);
        }
        self.cells[id].children = Some(children);
        id
    }
}

fn barnes_hut(positions: &[Vec2], guard: f64, theta: f64) -> Result<ForceEval> {
    let n = positions.len();
    if n == 1 {
        return Ok(ForceEval { forces: vec![Vec2::ZERO], min_separation: f64::INFINITY });
    }
    let tree = QuadTree::build(positions);
    let scale = 1.0 / (2.0 * PI * n as f64);
    let per: Vec<(Vec2, f64)> = positions
        .par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut f = Vec2::ZERO;
            let mut min2 = f64::INFINITY;
            let mut stack = vec![0usize];
            while let Some(c) = stack.pop() {
                let cell = &tree.cells[c];
                if cell.mass == 0.0 {
                    continue;
                }
                let d = xi - cell.com;
                let d2 = d.norm_sq();
                match cell.children {
                    Some(children) if 4.0 * cell.half * cell.half >= theta * theta * d2 => {
                        stack.extend(children.iter().rev());
                    }
                    Some(_) => f -= d * (cell.mass / d2),
                    None => {
                        for &j in &cell.bodies {
                            if j == i {
                                continue;
                            }
                            let r = xi - positions[j];
                            let r2 = r.norm_sq();
                            min2 = min2.min(r2);
                            f -= r / r2;
                        }
                    }
                }
            }
            (f * scale, min2)
        })
        .collect();
    let mut eval = finish(positions, per, guard * guard)?;
    // Far pairs are never visited individually, so the separation reported
    // is only a bound from above; recompute it exactly.
    eval.min_separation = min_separation(positions).0;
    Ok(eval)
}
