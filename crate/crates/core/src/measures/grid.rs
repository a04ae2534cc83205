use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constants::Dimension;
use crate::error::{Error, Result};
use crate::geom::{rect_disk_area, rect_far_dist2, rect_near_dist2, Point};

/// Slices per boundary cell in dimension 3.
const SLICES: usize = 32;

/// Region generator for grid measures: cells whose centers lie in the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
}

impl Region {
    fn contains(&self, p: &Point, dim: usize) -> bool {
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        match self {
            Region::Box { lo, hi } => (0..dim).all(|i| p[i] >= get(lo, i) && p[i] <= get(hi, i)),
            Region::Ball { center, radius } => {
                let d2: f64 = (0..dim).map(|i| (p[i] - get(center, i)).powi(2)).sum();
                d2 <= radius * radius
            }
            Region::Annulus {
                center,
                inner,
                outer,
            } => {
                let d2: f64 = (0..dim).map(|i| (p[i] - get(center, i)).powi(2)).sum();
                d2 >= inner * inner && d2 <= outer * outer
            }
        }
    }

    fn bounds(&self, dim: usize) -> ([f64; 3], [f64; 3]) {
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for i in 0..dim {
            match self {
                Region::Box { lo: l, hi: h } => {
                    lo[i] = get(l, i);
                    hi[i] = get(h, i);
                }
                Region::Ball { center, radius: r }
                | Region::Annulus {
                    center, outer: r, ..
                } => {
                    lo[i] = get(center, i) - r;
                    hi[i] = get(center, i) + r;
                }
            }
        }
        (lo, hi)
    }
}

/// Density times Lebesgue measure on a union of grid cells of side `cell`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub(crate) dim: Dimension,
    pub(crate) cell: f64,
    pub(crate) origin: Point,
    pub(crate) cells: Vec<[i64; 3]>,
    pub(crate) density: Vec<f64>,
    index: HashMap<[i64; 3], usize>,
}

impl Grid {
    pub fn new(
        dim: Dimension,
        cell: f64,
        origin: Point,
        cells: Vec<[i64; 3]>,
        density: Option<Vec<f64>>,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim.get()) {
            return Err(Error::Unsupported(format!("grid measures in dimension {dim}")));
        }
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Error::Domain(format!("cell side {cell} must be positive")));
        }
        let density = density.unwrap_or_else(|| vec![1.0; cells.len()]);
        if density.len() != cells.len() {
            return Err(Error::Domain("density list length differs from cell list".into()));
        }
        if density.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Domain("cell densities must be positive".into()));
        }
        let mut index = HashMap::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            if dim.get() == 2 && c[2] != 0 {
                return Err(Error::Domain(format!("planar cell {c:?} has a z index")));
            }
            if index.insert(*c, i).is_some() {
                return Err(Error::Domain(format!("duplicate cell {c:?}")));
            }
        }
        Ok(Grid {
            dim,
            cell,
            origin,
            cells,
            density,
            index,
        })
    }

    /// Unit-density cells of side `cell` (grid anchored at `origin`) whose
    /// centers lie in `region`.
    pub fn from_region(dim: Dimension, cell: f64, origin: Point, region: &Region) -> Result<Self> {
        let n = dim.as_usize();
        let (lo, hi) = region.bounds(n);
        let mut ilo = [0i64; 3];
        let mut ihi = [0i64; 3];
        for i in 0..n {
            ilo[i] = ((lo[i] - origin[i]) / cell).floor() as i64 - 1;
            ihi[i] = ((hi[i] - origin[i]) / cell).ceil() as i64 + 1;
        }
        let count: f64 = (0..n).map(|i| (ihi[i] - ilo[i] + 1) as f64).product();
        if count > 5e7 {
            return Err(Error::Domain(format!("region needs {count:e} cells")));
        }
        let mut cells = Vec::new();
        for i in ilo[0]..=ihi[0] {
            for j in ilo[1]..=ihi[1] {
                for k in ilo[2]..=ihi[2] {
                    let c = [i, j, k];
                    let mut p = [0.0; 3];
                    for a in 0..n {
                        p[a] = origin[a] + (c[a] as f64 + 0.5) * cell;
                    }
                    if region.contains(&p, n) {
                        cells.push(c);
                    }
                }
            }
        }
        Grid::new(dim, cell, origin, cells, None)
    }

    pub fn cell_side(&self) -> f64 {
        self.cell
    }

    pub fn cells(&self) -> &[[i64; 3]] {
        &self.cells
    }

    pub fn densities(&self) -> &[f64] {
        &self.density
    }

    pub fn max_density(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell.powi(self.dim.get() as i32)
    }

    pub fn total(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn cell_box(&self, c: &[i64; 3]) -> (Point, Point) {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..self.dim.as_usize() {
            lo[a] = self.origin[a] + c[a] as f64 * self.cell;
            hi[a] = lo[a] + self.cell;
        }
        (lo, hi)
    }

    pub fn cell_center(&self, c: &[i64; 3]) -> Point {
        let (lo, hi) = self.cell_box(c);
        [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0]
    }

    /// Lower and upper bounds for the mass of `B̄(y, t)`; exact in the plane.
    pub fn ball_mass_bounds(&self, y: &Point, t: f64) -> (f64, f64) {
        let n = self.dim.as_usize();
        let reach = (t / self.cell).ceil() as i64 + 1;
        let range_count = ((2 * reach + 1) as f64).powi(n as i32);
        let mut lower = 0.0;
        let mut upper = 0.0;
        let mut visit = |i: usize| {
            let (lo, hi) = self.cell_box(&self.cells[i]);
            let (a, b) = if n == 2 {
                let v = rect_disk_area(&[lo[0], lo[1]], &[hi[0], hi[1]], &[y[0], y[1]], t);
                (v, v)
            } else {
                cube_ball_volume(&lo, &hi, y, t)
            };
            lower += self.density[i] * a;
            upper += self.density[i] * b;
        };
        if range_count < self.cells.len() as f64 {
            let mut base = [0i64; 3];
            for a in 0..n {
                base[a] = ((y[a] - self.origin[a]) / self.cell).floor() as i64;
            }
            let zr = if n == 3 { reach } else { 0 };
            for i in -reach..=reach {
                for j in -reach..=reach {
                    for k in -zr..=zr {
                        let c = [base[0] + i, base[1] + j, base[2] + k];
                        if let Some(&idx) = self.index.get(&c) {
                            visit(idx);
                        }
                    }
                }
            }
        } else {
            for i in 0..self.cells.len() {
                visit(i);
            }
        }
        (lower, upper)
    }
}

/// Bounds for `vol(box ∩ B̄(c, t))`. The slice area `A(z)` of the box and the
/// ball is monotone on each side of `c_z`, so left and right Riemann sums on
/// those pieces bracket the integral.
fn cube_ball_volume(lo: &Point, hi: &Point, c: &Point, t: f64) -> (f64, f64) {
    let vol = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    if rect_near_dist2(lo, hi, c) > t * t {
        return (0.0, 0.0);
    }
    if rect_far_dist2(lo, hi, c) <= t * t {
        return (vol, vol);
    }
    let area = |z: f64| {
        let h2 = t * t - (z - c[2]).powi(2);
        if h2 <= 0.0 {
            return 0.0;
        }
        rect_disk_area(&[lo[0], lo[1]], &[hi[0], hi[1]], &[c[0], c[1]], h2.sqrt())
    };
    // slices only where the ball meets the slab
    let (z0, z1) = (lo[2].max(c[2] - t), hi[2].min(c[2] + t));
    let mut pieces = vec![z0];
    if c[2] > z0 && c[2] < z1 {
        pieces.push(c[2]);
    }
    pieces.push(z1);
    let mut lower = 0.0;
    let mut upper = 0.0;
    for w in pieces.windows(2) {
        let n = ((SLICES as f64 * (w[1] - w[0]) / (z1 - z0)).ceil() as usize).max(1);
        let h = (w[1] - w[0]) / n as f64;
        let mut prev = area(w[0]);
        for k in 1..=n {
            let z = if k == n { w[1] } else { w[0] + k as f64 * h };
            let cur = area(z);
            lower += prev.min(cur) * h;
            upper += prev.max(cur) * h;
            prev = cur;
        }
    }
    (lower, upper.min(vol))
}
