use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    dist, lift, segment_ball_clip, segment_segment_distance, segments_intersect, Point, Point2,
};

/// Ratio above which a curve is reported as not bilipschitz.
const BILIPSCHITZ_CAP: f64 = 1e8;

/// Density times arclength on a simple planar polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub(crate) vertices: Vec<Point2>,
    pub(crate) closed: bool,
    pub(crate) density: f64,
}

/// Lipschitz constants of a parameterization and of its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstants {
    pub lip: f64,
    pub lip_inv: f64,
    pub bilipschitz: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<Point2>, closed: bool, density: f64) -> Result<Self> {
        if vertices.len() < 2 || (closed && vertices.len() < 3) {
            return Err(Error::Degenerate("polyline needs at least two vertices".into()));
        }
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::Domain(format!("density {density} must be positive")));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite vertex".into()));
        }
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if vertices[i] == vertices[j] {
                    return Err(Error::Degenerate(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        let pl = Polyline {
            vertices,
            closed,
            density,
        };
        pl.check_simple()?;
        Ok(pl)
    }

    pub fn segment(a: Point2, b: Point2) -> Result<Self> {
        Self::new(vec![a, b], false, 1.0)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    pub fn segment_at(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (lift(&self.vertices[i]), lift(&self.vertices[(i + 1) % n]))
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.segment_count()).map(|i| self.segment_at(i))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| dist(&a, &b)).sum()
    }

    pub fn total(&self) -> f64 {
        self.density * self.length()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let m = self.segment_count();
        j == i + 1 || (self.closed && i == 0 && j == m - 1)
    }

    fn check_simple(&self) -> Result<()> {
        let m = self.segment_count();
        let n = self.vertices.len();
        let seg = |i: usize| (self.vertices[i], self.vertices[(i + 1) % n]);
        for i in 0..m {
            let (a, b) = seg(i);
            for j in i + 1..m {
                let (c, d) = seg(j);
                if self.adjacent(i, j) {
                    // shared vertex only; reject a fold back along the same line
                    let (u, v) = if j == i + 1 { ((a, b), (c, d)) } else { ((c, d), (a, b)) };
                    let e1 = [u.1[0] - u.0[0], u.1[1] - u.0[1]];
                    let e2 = [v.1[0] - v.0[0], v.1[1] - v.0[1]];
                    let cr = e1[0] * e2[1] - e1[1] * e2[0];
                    let dt = e1[0] * e2[0] + e1[1] * e2[1];
                    if cr == 0.0 && dt < 0.0 {
                        return Err(Error::SelfIntersection { first: i, second: j });
                    }
                    continue;
                }
                let bb = a[0].min(b[0]) > c[0].max(d[0])
                    || c[0].min(d[0]) > a[0].max(b[0])
                    || a[1].min(b[1]) > c[1].max(d[1])
                    || c[1].min(d[1]) > a[1].max(b[1]);
                if !bb && segments_intersect(&a, &b, &c, &d) {
                    return Err(Error::SelfIntersection { first: i, second: j });
                }
            }
        }
        Ok(())
    }

    pub fn ball_mass(&self, y: &Point, t: f64) -> f64 {
        let mut len = 0.0;
        for (a, b) in self.segments() {
            if let Some((s0, s1)) = segment_ball_clip(&a, &b, y, t) {
                len += (s1 - s0) * dist(&a, &b);
            }
        }
        self.density * len
    }

    /// Whether all vertices lie on one line (the polyline is then a segment).
    pub fn is_straight(&self) -> bool {
        if self.closed {
            return false;
        }
        let a = self.vertices[0];
        let b = self.vertices[self.vertices.len() - 1];
        let l = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        self.vertices.iter().all(|p| {
            let cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            cr.abs() <= 1e-14 * l * l
        })
    }

    /// Constants of the arclength parameterization: `Lip = 1` and `Lip⁻¹` the
    /// supremum of arc over chord. Closed curves use the shorter arc.
    pub fn lipschitz_constants(&self) -> LipschitzConstants {
        let m = self.segment_count();
        let lens: Vec<f64> = self.segments().map(|(a, b)| dist(&a, &b)).collect();
        let mut start = vec![0.0; m + 1];
        for i in 0..m {
            start[i + 1] = start[i] + lens[i];
        }
        let total = start[m];
        let arc = |x: f64, y: f64| {
            let d = (y - x).abs();
            if self.closed {
                d.min(total - d)
            } else {
                d
            }
        };
        let dirs: Vec<Point> = self
            .segments()
            .zip(&lens)
            .map(|((a, b), l)| [(b[0] - a[0]) / l, (b[1] - a[1]) / l, 0.0])
            .collect();
        let mut best: f64 = 1.0;
        let mut unbounded = false;
        for i in 0..m {
            for j in i + 1..m {
                if self.adjacent(i, j) {
                    let c = dirs[i][0] * dirs[j][0] + dirs[i][1] * dirs[j][1];
                    if 1.0 + c <= 1e-16 {
                        unbounded = true;
                    } else {
                        best = best.max((2.0 / (1.0 + c)).sqrt());
                    }
                    // the ratio is scale invariant near the shared vertex, so this
                    // is the supremum over the whole pair
                    continue;
                }
                let (a, b) = self.segment_at(i);
                let (c, d) = self.segment_at(j);
                let chord_min = segment_segment_distance(&a, &b, &c, &d);
                let arc_max = if self.closed {
                    total / 2.0
                } else {
                    start[j + 1] - start[i]
                };
                if chord_min <= 0.0 {
                    unbounded = true;
                    continue;
                }
                if arc_max / chord_min <= best {
                    continue;
                }
                let f = |s: f64, u: f64| {
                    let p = [a[0] + s * dirs[i][0], a[1] + s * dirs[i][1], 0.0];
                    let q = [c[0] + u * dirs[j][0], c[1] + u * dirs[j][1], 0.0];
                    arc(start[i] + s, start[j] + u) / dist(&p, &q)
                };
                let g = |s: f64| golden_max(|u| f(s, u), 0.0, lens[j]);
                best = best.max(golden_max(g, 0.0, lens[i]));
            }
        }
        let bilipschitz = !unbounded && best < BILIPSCHITZ_CAP;
        LipschitzConstants {
            lip: 1.0,
            lip_inv: if bilipschitz { best } else { f64::INFINITY },
            bilipschitz,
        }
    }
}

/// Maximum of a quasi-concave function on `[lo, hi]` by golden-section search,
/// with the endpoints checked explicitly.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut best = f(lo).max(f(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if b - a <= 1e-13 * (hi - lo).max(1e-300) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    best = best.max(f1).max(f2);
    best
}

/// Arclength measure on the graph `x ↦ x + i y(x)` of a sampled function.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCurve {
    pub curve: Polyline,
    pub slope_bound: f64,
    /// `Lip` of the graph parameterization, `√(1 + q²)`.
    pub lip: f64,
    /// Upper bound for `Lip` of the inverse parameterization.
    pub lip_inv: f64,
}

impl GraphCurve {
    pub fn constants(&self) -> LipschitzConstants {
        LipschitzConstants {
            lip: self.lip,
            lip_inv: self.lip_inv,
            bilipschitz: true,
        }
    }
}

/// Polyline through `(x_k, y_k)` for a function with slopes bounded by `q`.
pub fn curve_measure_from_graph(xs: &[f64], ys: &[f64], q: f64) -> Result<GraphCurve> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain("need matching sample lists of length ≥ 2".into()));
    }
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("slope bound {q} must be finite and ≥ 0")));
    }
    for i in 0..xs.len() - 1 {
        let dx = xs[i + 1] - xs[i];
        if !(dx > 0.0) {
            return Err(Error::Domain(format!("abscissae not increasing at {i}")));
        }
        let slope = (ys[i + 1] - ys[i]).abs() / dx;
        if slope > q * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::SlopeViolation {
                index: i,
                slope,
                bound: q,
            });
        }
    }
    let vertices = xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect();
    Ok(GraphCurve {
        curve: Polyline::new(vertices, false, 1.0)?,
        slope_bound: q,
        lip: (1.0 + q * q).sqrt(),
        lip_inv: 1.0,
    })
}
