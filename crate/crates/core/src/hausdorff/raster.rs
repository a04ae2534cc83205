use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geom::Point2;

use super::set::CompactSet;

/// Largest number of cells a two-dimensional set may scan.
const MAX_SCAN: f64 = 1.7e7;

/// Occupied cells of a dyadic grid over a box of side `side`, with the share
/// `λ(S ∩ Q)` of the natural measure in each cell.
#[derive(Clone, Debug)]
pub struct Raster {
    pub k: u32,
    pub origin: Point2,
    pub side: f64,
    pub cells: Vec<[u32; 2]>,
    pub weight: Vec<f64>,
}

impl Raster {
    /// The box has side `ext (1 + 2^-k)` and is shifted by a quarter cell so
    /// that dyadic coordinates of the input do not fall on cell boundaries.
    pub fn new(set: &CompactSet, k: u32) -> Result<Self> {
        set.validate()?;
        if k > 20 {
            return Err(Error::Domain(format!("resolution {k} exceeds 20")));
        }
        let (lo, hi) = set.bounding_box();
        let scale = 1.0 + lo[0].abs().max(lo[1].abs()).max(hi[0].abs()).max(hi[1].abs());
        let ext = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9 * scale);
        let n = 1u64 << k;
        let side = ext * (1.0 + 1.0 / n as f64);
        let shift = side / (4 * n) as f64;
        let origin = [
            0.5 * (lo[0] + hi[0]) - side / 2.0 - shift,
            0.5 * (lo[1] + hi[1]) - side / 2.0 - shift,
        ];
        let ell = side / n as f64;
        let to_cell = |x: f64, a: usize| -> i64 { ((x - origin[a]) / ell).floor() as i64 };
        let clampc = |v: i64| v.clamp(0, n as i64 - 1);
        let mut cand: HashSet<[u32; 2]> = HashSet::new();
        if let Some(pts) = set.trace(ell / 4.0) {
            for p in pts {
                let (i, j) = (to_cell(p[0], 0), to_cell(p[1], 1));
                for di in -1..=1 {
                    for dj in -1..=1 {
                        cand.insert([clampc(i + di) as u32, clampc(j + dj) as u32]);
                    }
                }
            }
        } else if let Some(pieces) = set.dust_pieces(ell) {
            for (p, s) in pieces {
                for i in clampc(to_cell(p[0], 0))..=clampc(to_cell(p[0] + s, 0)) {
                    for j in clampc(to_cell(p[1], 1))..=clampc(to_cell(p[1] + s, 1)) {
                        cand.insert([i as u32, j as u32]);
                    }
                }
            }
        } else {
            let (i0, i1) = (clampc(to_cell(lo[0], 0)), clampc(to_cell(hi[0], 0)));
            let (j0, j1) = (clampc(to_cell(lo[1], 1)), clampc(to_cell(hi[1], 1)));
            let count = ((i1 - i0 + 1) * (j1 - j0 + 1)) as f64;
            if count > MAX_SCAN {
                return Err(Error::Domain(format!("resolution {k} needs {count:e} cells")));
            }
            for i in i0..=i1 {
                for j in j0..=j1 {
                    cand.insert([i as u32, j as u32]);
                }
            }
        }
        let mut cand: Vec<[u32; 2]> = cand.into_iter().collect();
        cand.sort_unstable();
        let mut cells = Vec::with_capacity(cand.len());
        let mut weight = Vec::with_capacity(cand.len());
        let r = Raster {
            k,
            origin,
            side,
            cells: Vec::new(),
            weight: Vec::new(),
        };
        for c in cand {
            let (lo, hi) = r.cell_rect(k, c);
            let w = set.natural_mass_in(&lo, &hi);
            if w > 0.0 {
                cells.push(c);
                weight.push(w);
            }
        }
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Raster {
            cells,
            weight,
            ..r
        })
    }

    /// Cell side at level `j`.
    pub fn ell(&self, j: u32) -> f64 {
        self.side / 2f64.powi(j as i32)
    }

    pub fn cell_rect(&self, j: u32, c: [u32; 2]) -> (Point2, Point2) {
        let l = self.ell(j);
        let lo = [self.origin[0] + c[0] as f64 * l, self.origin[1] + c[1] as f64 * l];
        (lo, [lo[0] + l, lo[1] + l])
    }

    /// Grid coordinates (level-`k` units) to world coordinates.
    pub fn world(&self, g: [f64; 2]) -> Point2 {
        let l = self.ell(self.k);
        [self.origin[0] + g[0] * l, self.origin[1] + g[1] * l]
    }

    /// Occupied cells at a coarser level `j ≤ k`, sorted.
    pub fn occupied_at(&self, j: u32) -> Vec<[u32; 2]> {
        let s = self.k - j;
        let mut v: Vec<[u32; 2]> = self.cells.iter().map(|c| [c[0] >> s, c[1] >> s]).collect();
        v.dedup();
        v.sort_unstable();
        v.dedup();
        v
    }
}
