use serde::{Deserialize, Serialize};

use crate::constants::Dimension;
use crate::error::{Error, Result};
use crate::geom::{rect_disk_area, rect_far_dist2, rect_near_dist2, Point, Point2};

/// Base figure of a middle-thirds construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum CantorBase {
    /// Horizontal interval `[start, start + length e_1]`.
    Interval { start: Point2, length: f64 },
    /// Product set of the square `[lo, lo + side]^2` (four corner squares kept).
    Square { lo: Point2, side: f64 },
}

/// Uniform measure on the level-`n` stage of a ratio-1/3 self-similar set.
#[derive(Clone, Debug, PartialEq)]
pub struct Cantor {
    pub(crate) dim: Dimension,
    pub(crate) level: u32,
    pub(crate) base: CantorBase,
    pub(crate) mass: f64,
}

impl Cantor {
    pub const DEFAULT_LEVEL: u32 = 12;

    pub fn new(dim: Dimension, level: u32, base: CantorBase, mass: f64) -> Result<Self> {
        if dim.get() > 3 {
            return Err(Error::Unsupported(format!("measures in dimension {dim}")));
        }
        if level > 30 {
            return Err(Error::Domain(format!("level {level} exceeds 30")));
        }
        let size = match &base {
            CantorBase::Interval { length, .. } => *length,
            CantorBase::Square { side, .. } => *side,
        };
        if !(size > 0.0 && size.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain("Cantor base size and mass must be positive".into()));
        }
        Ok(Cantor {
            dim,
            level,
            base,
            mass,
        })
    }

    pub fn interval(level: u32) -> Self {
        Self::new(
            Dimension::PLANE,
            level,
            CantorBase::Interval {
                start: [0.0, 0.0],
                length: 1.0,
            },
            1.0,
        )
        .expect("valid Cantor interval")
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn base(&self) -> &CantorBase {
        &self.base
    }

    /// Similarity dimension of the limit set.
    pub fn exponent(&self) -> f64 {
        match self.base {
            CantorBase::Interval { .. } => 2f64.ln() / 3f64.ln(),
            CantorBase::Square { .. } => 4f64.ln() / 3f64.ln(),
        }
    }

    /// `b` with `h_μ(t) ≤ b t^p` for all `t`, `p = exponent()`.
    pub fn power_constant(&self) -> f64 {
        let p = self.exponent();
        match self.base {
            CantorBase::Interval { length, .. } => 2.0 * self.mass * (6.0 / length).powf(p),
            CantorBase::Square { side, .. } => 4.0 * self.mass * (6.0 / side).powf(p),
        }
    }

    /// Construction pieces at level `j ≤ n`, as `(lo corner, size)`.
    pub fn pieces(&self, j: u32) -> Vec<(Point2, f64)> {
        let j = j.min(self.level);
        let mut out = vec![match self.base {
            CantorBase::Interval { start, length } => (start, length),
            CantorBase::Square { lo, side } => (lo, side),
        }];
        let square = matches!(self.base, CantorBase::Square { .. });
        for _ in 0..j {
            let mut next = Vec::with_capacity(out.len() * 4);
            for (lo, s) in out {
                let c = s / 3.0;
                if square {
                    for (a, b) in [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)] {
                        next.push(([lo[0] + a * c, lo[1] + b * c], c));
                    }
                } else {
                    next.push((lo, c));
                    next.push(([lo[0] + 2.0 * c, lo[1]], c));
                }
            }
            out = next;
        }
        out
    }

    pub fn ball_mass(&self, y: &Point, t: f64) -> f64 {
        match self.base {
            CantorBase::Interval { start, length } => {
                let perp2 = (y[1] - start[1]).powi(2) + y[2] * y[2];
                if perp2 > t * t {
                    return 0.0;
                }
                let w = (t * t - perp2).sqrt();
                interval_mass(self.level, start[0], length, self.mass, y[0] - w, y[0] + w)
            }
            CantorBase::Square { lo, side } => {
                if y[2].abs() > t {
                    return 0.0;
                }
                let rho = (t * t - y[2] * y[2]).sqrt();
                square_mass(self.level, lo, side, self.mass, &[y[0], y[1]], rho)
            }
        }
    }
}

fn interval_mass(level: u32, x: f64, len: f64, m: f64, u: f64, v: f64) -> f64 {
    let (a, b) = (x, x + len);
    if v < a || u > b {
        return 0.0;
    }
    if u <= a && b <= v {
        return m;
    }
    if level == 0 {
        return m * (v.min(b) - u.max(a)) / len;
    }
    let c = len / 3.0;
    interval_mass(level - 1, a, c, m / 2.0, u, v) + interval_mass(level - 1, a + 2.0 * c, c, m / 2.0, u, v)
}

fn square_mass(level: u32, lo: Point2, s: f64, m: f64, c: &Point2, rho: f64) -> f64 {
    let hi = [lo[0] + s, lo[1] + s];
    if rect_near_dist2(&lo, &hi, c) > rho * rho {
        return 0.0;
    }
    if rect_far_dist2(&lo, &hi, c) <= rho * rho {
        return m;
    }
    if level == 0 {
        return m * rect_disk_area(&lo, &hi, c, rho) / (s * s);
    }
    let k = s / 3.0;
    [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)]
        .iter()
        .map(|(a, b)| square_mass(level - 1, [lo[0] + a * k, lo[1] + b * k], k, m / 4.0, c, rho))
        .sum()
}
