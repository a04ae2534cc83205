//! Concrete finite Borel measures with exact or certified ball masses.

mod atomic;
mod cantor;
mod curves;
mod grid;
mod modulus;
mod spec;
mod surface;

use serde::{Deserialize, Serialize};

use crate::constants::{Dimension, ExtendedReal};
use crate::geom::{dist, lift, rect_near_dist2, Point};
use crate::quad;

pub use atomic::Atomic;
pub use cantor::{Cantor, CantorBase};
pub use curves::{curve_measure_from_graph, GraphCurve, LipschitzConstants, Polyline};
pub use grid::{Grid, Region};
pub use modulus::{
    modulus_of_continuity, modulus_profile, modulus_with, ModulusBound, ModulusMode,
    ModulusOptions,
};
pub use spec::{AtomSpec, MeasureSpec};
pub use surface::Surface;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub enum MeasureRep {
    Atomic(Atomic),
    GridLebesgue(Grid),
    PolylineLength(Polyline),
    TriangulatedArea(Surface),
    CantorSelfSimilar(Cantor),
}

/// Two-sided bound for a mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassBounds {
    pub lower: f64,
    pub upper: f64,
}

impl MassBounds {
    pub fn exact(v: f64) -> Self {
        MassBounds { lower: v, upper: v }
    }

    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_gap(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// `h_μ(t) ≤ b t^p` for every `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBound {
    pub b: f64,
    pub p: f64,
}

impl PowerBound {
    pub fn eval(&self, t: f64) -> f64 {
        self.b * t.powf(self.p)
    }
}

impl MeasureRep {
    pub fn dim(&self) -> Dimension {
        match self {
            MeasureRep::Atomic(a) => a.dim,
            MeasureRep::GridLebesgue(g) => g.dim,
            MeasureRep::PolylineLength(_) => Dimension::PLANE,
            MeasureRep::TriangulatedArea(_) => Dimension::SPACE,
            MeasureRep::CantorSelfSimilar(c) => c.dim,
        }
    }

    /// `M = μ(R^d)`.
    pub fn total_mass(&self) -> f64 {
        match self {
            MeasureRep::Atomic(a) => a.total(),
            MeasureRep::GridLebesgue(g) => g.total(),
            MeasureRep::PolylineLength(p) => p.total(),
            MeasureRep::TriangulatedArea(s) => s.area(),
            MeasureRep::CantorSelfSimilar(c) => c.mass,
        }
    }

    /// Bounds for `μ(B̄_y(t))`. Only grids in dimension 3 return a gap.
    pub fn ball_mass_bounds(&self, y: &Point, t: f64) -> MassBounds {
        if t < 0.0 {
            return MassBounds::exact(0.0);
        }
        match self {
            MeasureRep::Atomic(a) => MassBounds::exact(a.ball_mass(y, t)),
            MeasureRep::GridLebesgue(g) => {
                let (lower, upper) = g.ball_mass_bounds(y, t);
                MassBounds { lower, upper }
            }
            MeasureRep::PolylineLength(p) => MassBounds::exact(p.ball_mass(y, t)),
            MeasureRep::TriangulatedArea(s) => MassBounds::exact(s.ball_mass(y, t)),
            MeasureRep::CantorSelfSimilar(c) => MassBounds::exact(c.ball_mass(y, t)),
        }
    }

    /// Points whose convex hull contains the support.
    pub fn hull_points(&self) -> Vec<Point> {
        match self {
            MeasureRep::Atomic(a) => a.atoms.iter().map(|x| x.0).collect(),
            MeasureRep::GridLebesgue(g) => {
                let mut out = Vec::with_capacity(g.cells.len() * 8);
                let n = g.dim.as_usize();
                for c in &g.cells {
                    let (lo, hi) = g.cell_box(c);
                    for k in 0..(1 << n) {
                        let mut p = lo;
                        for a in 0..n {
                            if k >> a & 1 == 1 {
                                p[a] = hi[a];
                            }
                        }
                        out.push(p);
                    }
                }
                out
            }
            MeasureRep::PolylineLength(p) => p.vertices.iter().map(lift).collect(),
            MeasureRep::TriangulatedArea(s) => s.triangles.iter().flatten().copied().collect(),
            MeasureRep::CantorSelfSimilar(c) => match c.base {
                CantorBase::Interval { start, length } => {
                    vec![lift(&start), [start[0] + length, start[1], 0.0]]
                }
                CantorBase::Square { lo, side } => vec![
                    lift(&lo),
                    [lo[0] + side, lo[1], 0.0],
                    [lo[0], lo[1] + side, 0.0],
                    [lo[0] + side, lo[1] + side, 0.0],
                ],
            },
        }
    }

    /// Axis-aligned bounding box of the support.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let pts = self.hull_points();
        let first = *pts.first()?;
        let mut lo = first;
        let mut hi = first;
        for p in &pts {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Some((lo, hi))
    }

    /// A closed ball containing the support: center of the bounding box and the
    /// farthest hull point.
    pub fn enclosing_ball(&self) -> Option<(Point, f64)> {
        let (lo, hi) = self.bounding_box()?;
        let c = [
            (lo[0] + hi[0]) / 2.0,
            (lo[1] + hi[1]) / 2.0,
            (lo[2] + hi[2]) / 2.0,
        ];
        let r = self
            .hull_points()
            .iter()
            .map(|p| dist(p, &c))
            .fold(0.0, f64::max);
        Some((c, r))
    }

    /// Smallest `r` with `supp μ ⊂ B̄(0, r)`.
    pub fn support_radius(&self) -> f64 {
        self.hull_points()
            .iter()
            .map(|p| dist(p, &[0.0; 3]))
            .fold(0.0, f64::max)
    }

    /// Representative support points, used to seed sup searches.
    pub fn sample_points(&self, max: usize) -> Vec<Point> {
        let thin = |v: Vec<Point>| -> Vec<Point> {
            if v.len() <= max {
                return v;
            }
            let step = v.len() as f64 / max as f64;
            (0..max).map(|i| v[(i as f64 * step) as usize]).collect()
        };
        match self {
            MeasureRep::Atomic(a) => thin(a.atoms.iter().map(|x| x.0).collect()),
            MeasureRep::GridLebesgue(g) => thin(g.cells.iter().map(|c| g.cell_center(c)).collect()),
            MeasureRep::PolylineLength(p) => {
                let mut v = Vec::new();
                for (a, b) in p.segments() {
                    for k in 0..8 {
                        let s = (k as f64 + 0.5) / 8.0;
                        v.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), 0.0]);
                    }
                }
                thin(v)
            }
            MeasureRep::TriangulatedArea(s) => thin(
                s.triangles
                    .iter()
                    .map(|t| {
                        let mut c = [0.0; 3];
                        for a in 0..3 {
                            c[a] = (t[0][a] + t[1][a] + t[2][a]) / 3.0;
                        }
                        c
                    })
                    .collect(),
            ),
            MeasureRep::CantorSelfSimilar(c) => {
                let depth = match c.base {
                    CantorBase::Interval { .. } => 8,
                    CantorBase::Square { .. } => 4,
                };
                let square = matches!(c.base, CantorBase::Square { .. });
                thin(
                    c.pieces(depth)
                        .into_iter()
                        .map(|(lo, s)| {
                            let y = if square { lo[1] + s / 2.0 } else { lo[1] };
                            [lo[0] + s / 2.0, y, 0.0]
                        })
                        .collect(),
                )
            }
        }
    }

    /// A power law dominating the modulus of continuity at every scale, if the
    /// measure has one. Atomic measures have none.
    pub fn small_scale_bound(&self) -> Option<PowerBound> {
        match self {
            MeasureRep::Atomic(a) if a.atoms().is_empty() => Some(PowerBound {
                b: 0.0,
                p: a.dim.as_f64(),
            }),
            MeasureRep::Atomic(_) => None,
            MeasureRep::GridLebesgue(g) => {
                let d = g.dim.as_f64();
                Some(PowerBound {
                    b: g.max_density() * crate::constants::c_p(d).ok()?,
                    p: d,
                })
            }
            MeasureRep::PolylineLength(p) => {
                // preimage of a ball has parameter diameter ≤ 2 t Lip⁻¹
                let lc = p.lipschitz_constants();
                if !lc.bilipschitz {
                    return None;
                }
                let k = if p.closed { 4.0 } else { 2.0 };
                Some(PowerBound {
                    b: k * lc.lip_inv * p.density,
                    p: 1.0,
                })
            }
            MeasureRep::TriangulatedArea(s) => {
                // isodiametric bound in the parameter domain, then the area factor
                let lc = s.lipschitz_constants().ok()?;
                if !lc.bilipschitz {
                    return None;
                }
                Some(PowerBound {
                    b: std::f64::consts::PI * (lc.lip * lc.lip_inv).powi(2),
                    p: 2.0,
                })
            }
            MeasureRep::CantorSelfSimilar(c) => Some(PowerBound {
                b: c.power_constant(),
                p: c.exponent(),
            }),
        }
    }
}

/// Mass of the closed ball `B̄_y(t)`; grids in dimension 3 report the midpoint
/// of their bounds.
pub fn ball_mass(mu: &MeasureRep, y: &Point, t: f64) -> f64 {
    mu.ball_mass_bounds(y, t).value()
}

/// Total mass of a measure.
pub fn total_mass(mu: &MeasureRep) -> f64 {
    mu.total_mass()
}

/// Area of a triangulated surface.
pub fn surface_measure_total(s: &Surface) -> f64 {
    s.area()
}

/// Lipschitz constants of a curve or surface measure.
pub fn lipschitz_constants(mu: &MeasureRep) -> Result<LipschitzConstants> {
    let lc = match mu {
        MeasureRep::PolylineLength(p) => p.lipschitz_constants(),
        MeasureRep::TriangulatedArea(s) => s.lipschitz_constants()?,
        _ => {
            return Err(Error::Unsupported(
                "Lipschitz constants need a curve or surface measure".into(),
            ))
        }
    };
    Ok(lc)
}

/// `N_y^μ(x) = ĥd ∫₀^x μ(B̄_y(t)) / t^{d-1} dt`.
pub fn radial_counting_n(mu: &MeasureRep, y: &Point, x: f64) -> ExtendedReal {
    let d = mu.dim();
    let hd = d.hat_d() as f64;
    if let MeasureRep::Atomic(a) = mu {
        return atomic_counting(a, y, x);
    }
    if x <= 0.0 {
        return ExtendedReal::Finite(0.0);
    }
    let Some((lo, hi)) = mu.bounding_box() else {
        return ExtendedReal::Finite(0.0);
    };
    let t0 = rect_near_dist2(&lo, &hi, y).sqrt();
    if t0 > x {
        return ExtendedReal::Finite(0.0);
    }
    let dm2 = d.as_f64() - 2.0;
    let decay = mu.small_scale_bound().map(|b| b.p - dm2).unwrap_or(0.0);
    if decay <= 0.0 {
        return ExtendedReal::PosInf;
    }
    // t = x e^{-u}; the integrand is μ_y(t) t^{2-d}
    let mut umax = (40.0 / decay).min(700.0);
    if t0 > 0.0 {
        umax = umax.min((x / t0).ln());
    }
    let f = |u: f64| {
        let t = x * (-u).exp();
        ball_mass(mu, y, t) * t.powf(-dm2)
    };
    let r = quad::integrate(&f, 0.0, umax, 1e-15, 1e-11, 4000);
    ExtendedReal::Finite(hd * r.value)
}

fn atomic_counting(a: &Atomic, y: &Point, x: f64) -> ExtendedReal {
    let d = a.dim;
    let hd = d.hat_d() as f64;
    let mut sum = 0.0;
    for (p, m) in &a.atoms {
        let r = dist(p, y);
        if r > x {
            continue;
        }
        if r == 0.0 {
            return ExtendedReal::PosInf;
        }
        sum += if d.get() == 2 {
            m * (x / r).ln()
        } else {
            let k = d.as_f64() - 2.0;
            m * hd * (r.powf(-k) - x.powf(-k)) / k
        };
    }
    ExtendedReal::Finite(sum)
}

#[cfg(test)]
mod tests;
