use std::collections::HashMap;

use crate::constants::Dimension;
use crate::error::{Error, Result};
use crate::geom::{dist, Point};

/// Finite sum of point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct Atomic {
    pub(crate) dim: Dimension,
    pub(crate) atoms: Vec<(Point, f64)>,
}

impl Atomic {
    pub fn new(dim: Dimension, atoms: Vec<(Point, f64)>) -> Result<Self> {
        if dim.get() > 3 {
            return Err(Error::Unsupported(format!("measures in dimension {dim}")));
        }
        for (p, m) in &atoms {
            if !(*m > 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("atom mass {m} must be positive")));
            }
            if p.iter().any(|x| !x.is_finite()) || (dim.get() == 2 && p[2] != 0.0) {
                return Err(Error::Domain(format!("bad atom position {p:?}")));
            }
        }
        Ok(Atomic { dim, atoms })
    }

    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn ball_mass(&self, y: &Point, t: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|(p, _)| dist(p, y) <= t)
            .map(|a| a.1)
            .sum()
    }

    /// Mass at the point `y` itself.
    pub fn point_mass(&self, y: &Point) -> f64 {
        self.atoms.iter().filter(|(p, _)| p == y).map(|a| a.1).sum()
    }
}

/// Exact `sup_y μ(B̄_y(t))` for planar atomic measures. An optimal ball can be
/// moved until two atoms sit on its boundary (or one atom is its center), so
/// the candidate centers are the atoms and the pairwise circle intersections.
/// Returns `None` when the candidate set is too large.
pub(crate) fn exact_planar_modulus(mu: &Atomic, t: f64) -> Option<f64> {
    const MAX_PAIRS: usize = 4_000_000;
    let atoms = &mu.atoms;
    if atoms.is_empty() {
        return Some(0.0);
    }
    // slightly inflated radius absorbs rounding of the intersection points
    let teff = t * (1.0 + 1e-12) + 1e-300;
    let scale = atoms
        .iter()
        .map(|(p, _)| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    // buckets at least 2t wide; never so small that the keys overflow
    let cell = (2.0 * t).max(1e-12 * scale);
    let key = |p: &Point| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, (p, _)) in atoms.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let mass_at = |c: &Point| -> f64 {
        let (kx, ky) = key(c);
        let mut m = 0.0;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = buckets.get(&(kx.saturating_add(dx), ky.saturating_add(dy))) {
                    for &i in v {
                        if dist(&atoms[i].0, c) <= teff {
                            m += atoms[i].1;
                        }
                    }
                }
            }
        }
        m
    };
    let mut best: f64 = 0.0;
    for (p, _) in atoms {
        best = best.max(mass_at(p));
    }
    if t == 0.0 {
        return Some(best);
    }
    let mut pairs = 0usize;
    for (i, (p, _)) in atoms.iter().enumerate() {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(v) = buckets.get(&(kx.saturating_add(dx), ky.saturating_add(dy))) else {
                    continue;
                };
                for &j in v {
                    if j <= i {
                        continue;
                    }
                    let q = &atoms[j].0;
                    let d = dist(p, q);
                    if d > 2.0 * t || d == 0.0 {
                        continue;
                    }
                    pairs += 1;
                    if pairs > MAX_PAIRS {
                        return None;
                    }
                    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, 0.0];
                    let h = (t * t - d * d / 4.0).max(0.0).sqrt();
                    let n = [-(q[1] - p[1]) / d, (q[0] - p[0]) / d];
                    for sgn in [-1.0, 1.0] {
                        let c = [mid[0] + sgn * h * n[0], mid[1] + sgn * h * n[1], 0.0];
                        best = best.max(mass_at(&c));
                    }
                }
            }
        }
    }
    Some(best)
}
