use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{rect_disk_area, Point2};
use crate::measures::{MeasureRep, PowerBound};

/// Compact planar set given by an analytic primitive or a cell union.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum CompactSet {
    Point { at: Point2 },
    Points { at: Vec<Point2> },
    Segment { a: Point2, b: Point2 },
    Polyline { vertices: Vec<Point2> },
    Disk { center: Point2, radius: f64 },
    Square { lo: Point2, side: f64 },
    /// Circular arc `center + radius (cos θ, sin θ)`, `θ ∈ [start, end]`.
    Arc { center: Point2, radius: f64, start: f64, end: f64 },
    /// Level-`n` middle-thirds stage of a horizontal interval.
    Cantor { level: u32, start: Point2, length: f64 },
    /// Level-`n` stage of the four-corner product Cantor set.
    CantorDust { level: u32, lo: Point2, side: f64 },
    /// Union of closed cells `origin + cell·([i, i+1] × [j, j+1])`.
    Cells { cell: f64, origin: Point2, cells: Vec<[i64; 2]> },
}

pub(crate) fn d2(a: &Point2, b: &Point2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn clamp_to_segment(p: &Point2, a: &Point2, b: &Point2) -> Point2 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let s = if dd == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / dd).clamp(0.0, 1.0)
    };
    [a[0] + s * d[0], a[1] + s * d[1]]
}

/// Length of `[a, b] ∩ [lo, hi]` (Liang–Barsky clipping).
pub(crate) fn segment_rect_length(a: &Point2, b: &Point2, lo: &Point2, hi: &Point2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..2 {
        if d[k] == 0.0 {
            if a[k] < lo[k] || a[k] > hi[k] {
                return 0.0;
            }
        } else {
            let u = (lo[k] - a[k]) / d[k];
            let v = (hi[k] - a[k]) / d[k];
            t0 = t0.max(u.min(v));
            t1 = t1.min(u.max(v));
        }
    }
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * (d[0] * d[0] + d[1] * d[1]).sqrt()
    }
}

fn interval_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

fn rect_overlap(lo: &Point2, hi: &Point2, lo2: &Point2, hi2: &Point2) -> f64 {
    interval_overlap(lo[0], hi[0], lo2[0], hi2[0]) * interval_overlap(lo[1], hi[1], lo2[1], hi2[1])
}

fn cantor_interval_mass(level: u32, x: f64, len: f64, m: f64, u: f64, v: f64) -> f64 {
    let b = x + len;
    if v <= x || u >= b {
        return 0.0;
    }
    if u <= x && b <= v {
        return m;
    }
    if level == 0 {
        return m * (v.min(b) - u.max(x)) / len;
    }
    let c = len / 3.0;
    cantor_interval_mass(level - 1, x, c, m / 2.0, u, v)
        + cantor_interval_mass(level - 1, x + 2.0 * c, c, m / 2.0, u, v)
}

fn dust_rect_mass(level: u32, lo: Point2, s: f64, m: f64, rlo: &Point2, rhi: &Point2) -> f64 {
    let hi = [lo[0] + s, lo[1] + s];
    let ov = rect_overlap(&lo, &hi, rlo, rhi);
    if ov <= 0.0 {
        return 0.0;
    }
    if ov >= s * s || level == 0 {
        return m * ov / (s * s);
    }
    let k = s / 3.0;
    [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)]
        .iter()
        .map(|(a, b)| dust_rect_mass(level - 1, [lo[0] + a * k, lo[1] + b * k], k, m / 4.0, rlo, rhi))
        .sum()
}

pub(crate) fn cantor_pieces(level: u32, lo: Point2, size: f64, square: bool, upto: u32) -> Vec<(Point2, f64)> {
    let mut out = vec![(lo, size)];
    for _ in 0..upto.min(level) {
        let mut next = Vec::with_capacity(out.len() * 4);
        for (p, s) in out {
            let c = s / 3.0;
            if square {
                for (a, b) in [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)] {
                    next.push(([p[0] + a * c, p[1] + b * c], c));
                }
            } else {
                next.push((p, c));
                next.push(([p[0] + 2.0 * c, p[1]], c));
            }
        }
        out = next;
    }
    out
}

impl CompactSet {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.to_string()));
        match self {
            CompactSet::Points { at } if at.is_empty() => return Err(Error::EmptySet),
            CompactSet::Polyline { vertices } if vertices.len() < 2 => return Err(Error::EmptySet),
            CompactSet::Cells { cells, .. } if cells.is_empty() => return Err(Error::EmptySet),
            CompactSet::Cells { cell, .. } if !(*cell > 0.0) => return bad("cell side must be positive"),
            CompactSet::Disk { radius, .. } if !(*radius > 0.0) => return bad("disk radius must be positive"),
            CompactSet::Square { side, .. } if !(*side > 0.0) => return bad("square side must be positive"),
            CompactSet::Arc { radius, start, end, .. } => {
                if !(*radius > 0.0 && end > start && end - start < TAU) {
                    return bad("arc needs radius > 0 and 0 < end - start < 2π");
                }
            }
            CompactSet::Cantor { length, level, .. } if !(*length > 0.0) || *level > 30 => {
                return bad("Cantor set needs length > 0 and level ≤ 30")
            }
            CompactSet::CantorDust { side, level, .. } if !(*side > 0.0) || *level > 30 => {
                return bad("Cantor dust needs side > 0 and level ≤ 30")
            }
            _ => {}
        }
        Ok(())
    }

    /// Compact planar support of a measure.
    pub fn support_of(mu: &MeasureRep) -> Result<Self> {
        use crate::measures::CantorBase;
        if mu.dim().get() != 2 {
            return Err(Error::Unsupported("contents are computed in the plane only".into()));
        }
        Ok(match mu {
            MeasureRep::Atomic(a) => CompactSet::Points {
                at: a.atoms().iter().map(|(p, _)| [p[0], p[1]]).collect(),
            },
            MeasureRep::PolylineLength(p) => {
                let mut v = p.vertices().to_vec();
                if p.is_closed() {
                    v.push(v[0]);
                }
                CompactSet::Polyline { vertices: v }
            }
            MeasureRep::GridLebesgue(g) => {
                let o = g.cell_box(&[0, 0, 0]).0;
                CompactSet::Cells {
                    cell: g.cell_side(),
                    origin: [o[0], o[1]],
                    cells: g.cells().iter().map(|c| [c[0], c[1]]).collect(),
                }
            }
            MeasureRep::CantorSelfSimilar(c) => match *c.base() {
                CantorBase::Interval { start, length } => CompactSet::Cantor {
                    level: c.level(),
                    start,
                    length,
                },
                CantorBase::Square { lo, side } => CompactSet::CantorDust {
                    level: c.level(),
                    lo,
                    side,
                },
            },
            MeasureRep::TriangulatedArea(_) => {
                return Err(Error::Unsupported("surface supports are not planar".into()))
            }
        })
    }

    pub(crate) fn segments(&self) -> Vec<(Point2, Point2)> {
        match self {
            CompactSet::Segment { a, b } => vec![(*a, *b)],
            CompactSet::Polyline { vertices } => vertices.windows(2).map(|w| (w[0], w[1])).collect(),
            _ => Vec::new(),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let pts = self.hull_points();
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        if let CompactSet::Arc { .. } = self {
            // extreme points of the circle inside the angular range
            let (c, r) = self.arc_params();
            for k in 0..4 {
                let th = k as f64 * PI / 2.0;
                if self.arc_contains_angle(th) {
                    let p = [c[0] + r * th.cos(), c[1] + r * th.sin()];
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
            }
        }
        (lo, hi)
    }

    fn arc_params(&self) -> (Point2, f64) {
        match self {
            CompactSet::Arc { center, radius, .. } => (*center, *radius),
            _ => unreachable!("not an arc"),
        }
    }

    fn arc_contains_angle(&self, th: f64) -> bool {
        let CompactSet::Arc { start, end, .. } = self else {
            return false;
        };
        let mut x = th;
        while x < *start {
            x += TAU;
        }
        while x > *start + TAU {
            x -= TAU;
        }
        x <= *end
    }

    /// Points whose convex hull contains the set (arcs: endpoints and samples).
    pub fn hull_points(&self) -> Vec<Point2> {
        match self {
            CompactSet::Point { at } => vec![*at],
            CompactSet::Points { at } => at.clone(),
            CompactSet::Segment { a, b } => vec![*a, *b],
            CompactSet::Polyline { vertices } => vertices.clone(),
            CompactSet::Disk { center, radius } => {
                let r = *radius;
                vec![
                    [center[0] - r, center[1] - r],
                    [center[0] + r, center[1] + r],
                ]
            }
            CompactSet::Square { lo, side } => vec![
                *lo,
                [lo[0] + side, lo[1]],
                [lo[0], lo[1] + side],
                [lo[0] + side, lo[1] + side],
            ],
            CompactSet::Arc {
                center,
                radius,
                start,
                end,
            } => (0..=64)
                .map(|k| {
                    let th = start + (end - start) * k as f64 / 64.0;
                    [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
                })
                .collect(),
            CompactSet::Cantor { start, length, .. } => vec![*start, [start[0] + length, start[1]]],
            CompactSet::CantorDust { lo, side, .. } => vec![
                *lo,
                [lo[0] + side, lo[1]],
                [lo[0], lo[1] + side],
                [lo[0] + side, lo[1] + side],
            ],
            CompactSet::Cells { cell, origin, cells } => {
                let mut v = Vec::with_capacity(cells.len() * 4);
                for c in cells {
                    let x = origin[0] + c[0] as f64 * cell;
                    let y = origin[1] + c[1] as f64 * cell;
                    v.extend([[x, y], [x + cell, y], [x, y + cell], [x + cell, y + cell]]);
                }
                v
            }
        }
    }

    /// Exact `max_{x ∈ S} |x − c|`.
    pub fn max_dist_from(&self, c: &Point2) -> f64 {
        match self {
            CompactSet::Disk { center, radius } => d2(c, center) + radius,
            CompactSet::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let mut m = [*start, *end]
                    .iter()
                    .map(|th| d2(c, &[center[0] + radius * th.cos(), center[1] + radius * th.sin()]))
                    .fold(0.0, f64::max);
                let away = (center[1] - c[1]).atan2(center[0] - c[0]);
                if self.arc_contains_angle(away) || d2(c, center) == 0.0 {
                    m = m.max(d2(c, center) + radius);
                }
                m
            }
            _ => self.hull_points().iter().map(|p| d2(p, c)).fold(0.0, f64::max),
        }
    }

    /// A nearest point of the set to `p`.
    pub fn project(&self, p: &Point2) -> Point2 {
        let nearest = |cands: Vec<Point2>| {
            cands
                .into_iter()
                .min_by(|a, b| d2(a, p).total_cmp(&d2(b, p)))
                .expect("non-empty")
        };
        match self {
            CompactSet::Point { at } => *at,
            CompactSet::Points { at } => nearest(at.clone()),
            CompactSet::Segment { .. } | CompactSet::Polyline { .. } => nearest(
                self.segments()
                    .iter()
                    .map(|(a, b)| clamp_to_segment(p, a, b))
                    .collect(),
            ),
            CompactSet::Disk { center, radius } => {
                let d = d2(p, center);
                if d <= *radius {
                    *p
                } else {
                    let s = radius / d;
                    [center[0] + s * (p[0] - center[0]), center[1] + s * (p[1] - center[1])]
                }
            }
            CompactSet::Square { lo, side } => [
                p[0].clamp(lo[0], lo[0] + side),
                p[1].clamp(lo[1], lo[1] + side),
            ],
            CompactSet::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let th = (p[1] - center[1]).atan2(p[0] - center[0]);
                let on = |t: f64| [center[0] + radius * t.cos(), center[1] + radius * t.sin()];
                if self.arc_contains_angle(th) {
                    on(th)
                } else {
                    nearest(vec![on(*start), on(*end)])
                }
            }
            CompactSet::Cantor {
                level,
                start,
                length,
            } => {
                let pieces = cantor_pieces(*level, *start, *length, false, *level);
                nearest(
                    pieces
                        .iter()
                        .map(|(q, s)| [p[0].clamp(q[0], q[0] + s), q[1]])
                        .collect(),
                )
            }
            CompactSet::CantorDust { level, lo, side } => {
                let pieces = cantor_pieces(*level, *lo, *side, true, (*level).min(8));
                nearest(
                    pieces
                        .iter()
                        .map(|(q, s)| [p[0].clamp(q[0], q[0] + s), p[1].clamp(q[1], q[1] + s)])
                        .collect(),
                )
            }
            CompactSet::Cells { cell, origin, cells } => nearest(
                cells
                    .iter()
                    .map(|c| {
                        let x = origin[0] + c[0] as f64 * cell;
                        let y = origin[1] + c[1] as f64 * cell;
                        [p[0].clamp(x, x + cell), p[1].clamp(y, y + cell)]
                    })
                    .collect(),
            ),
        }
    }

    /// Mass of the natural measure λ of the set (length, area, Cantor
    /// measure or counting measure) inside the closed rectangle `[lo, hi]`.
    pub fn natural_mass_in(&self, lo: &Point2, hi: &Point2) -> f64 {
        match self {
            CompactSet::Point { at } => inside(at, lo, hi) as u8 as f64,
            CompactSet::Points { at } => at.iter().filter(|p| inside(p, lo, hi)).count() as f64,
            CompactSet::Segment { .. } | CompactSet::Polyline { .. } => self
                .segments()
                .iter()
                .map(|(a, b)| segment_rect_length(a, b, lo, hi))
                .sum(),
            CompactSet::Disk { center, radius } => rect_disk_area(lo, hi, center, *radius),
            CompactSet::Square { lo: l, side } => rect_overlap(l, &[l[0] + side, l[1] + side], lo, hi),
            CompactSet::Arc { .. } => self.arc_rect_length(lo, hi),
            CompactSet::Cantor {
                level,
                start,
                length,
            } => {
                if start[1] < lo[1] || start[1] > hi[1] {
                    0.0
                } else {
                    cantor_interval_mass(*level, start[0], *length, 1.0, lo[0], hi[0])
                }
            }
            CompactSet::CantorDust { level, lo: l, side } => dust_rect_mass(*level, *l, *side, 1.0, lo, hi),
            CompactSet::Cells { cell, origin, cells } => cells
                .iter()
                .map(|c| {
                    let x = origin[0] + c[0] as f64 * cell;
                    let y = origin[1] + c[1] as f64 * cell;
                    rect_overlap(&[x, y], &[x + cell, y + cell], lo, hi)
                })
                .sum(),
        }
    }

    pub fn natural_total(&self) -> f64 {
        match self {
            CompactSet::Point { .. } => 1.0,
            CompactSet::Points { at } => at.len() as f64,
            CompactSet::Segment { .. } | CompactSet::Polyline { .. } => {
                self.segments().iter().map(|(a, b)| d2(a, b)).sum()
            }
            CompactSet::Disk { radius, .. } => PI * radius * radius,
            CompactSet::Square { side, .. } => side * side,
            CompactSet::Arc { radius, start, end, .. } => radius * (end - start),
            CompactSet::Cantor { .. } | CompactSet::CantorDust { .. } => 1.0,
            CompactSet::Cells { cell, cells, .. } => cells.len() as f64 * cell * cell,
        }
    }

    /// `h_λ(t) ≤ a t^q` for the natural measure, or `None` if λ has atoms.
    pub fn natural_modulus(&self) -> Option<PowerBound> {
        match self {
            CompactSet::Point { .. } | CompactSet::Points { .. } => None,
            CompactSet::Segment { .. } => Some(PowerBound { b: 2.0, p: 1.0 }),
            CompactSet::Polyline { vertices } => {
                let pl = crate::measures::Polyline::new(vertices.clone(), false, 1.0).ok()?;
                let lc = pl.lipschitz_constants();
                lc.bilipschitz.then_some(PowerBound {
                    b: 2.0 * lc.lip_inv,
                    p: 1.0,
                })
            }
            CompactSet::Arc { .. } => Some(PowerBound { b: PI, p: 1.0 }),
            CompactSet::Disk { .. } | CompactSet::Square { .. } | CompactSet::Cells { .. } => {
                Some(PowerBound { b: PI, p: 2.0 })
            }
            CompactSet::Cantor { length, .. } => {
                let p = 2f64.ln() / 3f64.ln();
                Some(PowerBound {
                    b: 2.0 * (6.0 / length).powf(p),
                    p,
                })
            }
            CompactSet::CantorDust { side, .. } => {
                let p = 4f64.ln() / 3f64.ln();
                Some(PowerBound {
                    b: 4.0 * (6.0 / side).powf(p),
                    p,
                })
            }
        }
    }

    fn arc_rect_length(&self, lo: &Point2, hi: &Point2) -> f64 {
        let CompactSet::Arc {
            center,
            radius,
            start,
            end,
        } = self
        else {
            return 0.0;
        };
        let (c, r) = (center, *radius);
        let mut angles = vec![*start, *end];
        let norm = |th: f64| {
            let mut x = th;
            while x < *start {
                x += TAU;
            }
            while x >= *start + TAU {
                x -= TAU;
            }
            x
        };
        for k in 0..2 {
            for v in [lo[k], hi[k]] {
                let q = (v - c[k]) / r;
                if q.abs() > 1.0 {
                    continue;
                }
                let base = if k == 0 { q.acos() } else { q.asin() };
                let sols = if k == 0 { [base, -base] } else { [base, PI - base] };
                for th in sols {
                    let th = norm(th);
                    if th > *start && th < *end {
                        angles.push(th);
                    }
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        let mut len = 0.0;
        for w in angles.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let m = 0.5 * (w[0] + w[1]);
            let p = [c[0] + r * m.cos(), c[1] + r * m.sin()];
            if inside(&p, lo, hi) {
                len += r * (w[1] - w[0]);
            }
        }
        len
    }

    /// Points along the set at spacing at most `h`, used to find the cells it
    /// meets. Two-dimensional sets return `None` (scan their bounding box).
    pub(crate) fn trace(&self, h: f64) -> Option<Vec<Point2>> {
        let along = |a: &Point2, b: &Point2, out: &mut Vec<Point2>| {
            let n = (d2(a, b) / h).ceil().max(1.0) as usize;
            for k in 0..=n {
                let s = k as f64 / n as f64;
                out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        };
        match self {
            CompactSet::Point { at } => Some(vec![*at]),
            CompactSet::Points { at } => Some(at.clone()),
            CompactSet::Segment { .. } | CompactSet::Polyline { .. } => {
                let mut out = Vec::new();
                for (a, b) in self.segments() {
                    along(&a, &b, &mut out);
                }
                Some(out)
            }
            CompactSet::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let n = (radius * (end - start) / h).ceil().max(1.0) as usize;
                Some(
                    (0..=n)
                        .map(|k| {
                            let th = start + (end - start) * k as f64 / n as f64;
                            [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
                        })
                        .collect(),
                )
            }
            CompactSet::Cantor {
                level,
                start,
                length,
            } => {
                let mut j = 0;
                while j < *level && length / 3f64.powi(j as i32) > h {
                    j += 1;
                }
                let mut out = Vec::new();
                for (p, s) in cantor_pieces(*level, *start, *length, false, j) {
                    along(&p, &[p[0] + s, p[1]], &mut out);
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Cantor dust pieces no larger than `h` (for cell enumeration).
    pub(crate) fn dust_pieces(&self, h: f64) -> Option<Vec<(Point2, f64)>> {
        let CompactSet::CantorDust { level, lo, side } = self else {
            return None;
        };
        let mut j = 0;
        while j < *level && side / 3f64.powi(j as i32) > h {
            j += 1;
        }
        Some(cantor_pieces(*level, *lo, *side, true, j))
    }
}

fn inside(p: &Point2, lo: &Point2, hi: &Point2) -> bool {
    p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]
}
