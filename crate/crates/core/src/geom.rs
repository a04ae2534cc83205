//! Small Euclidean geometry kernel. Points live in `R^3`; planar data uses
//! `z = 0`.

pub type Point = [f64; 3];
pub type Point2 = [f64; 2];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

#[inline]
pub fn lift(p: &Point2) -> Point {
    [p[0], p[1], 0.0]
}

#[inline]
fn cross2(a: &Point2, b: &Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Parameter range `[s0, s1] ⊂ [0, 1]` of the segment `a + s (b - a)` lying in
/// the closed ball `B(c, t)`, if non-empty.
pub fn segment_ball_clip(a: &Point, b: &Point, c: &Point, t: f64) -> Option<(f64, f64)> {
    let d = sub(b, a);
    let f = sub(a, c);
    let dd = dot(&d, &d);
    if dd == 0.0 {
        return (dot(&f, &f) <= t * t).then_some((0.0, 1.0));
    }
    // |f + s d|^2 = t^2
    let bq = dot(&f, &d);
    let cq = dot(&f, &f) - t * t;
    let disc = bq * bq - dd * cq;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let s0 = ((-bq - sq) / dd).max(0.0);
    let s1 = ((-bq + sq) / dd).min(1.0);
    (s0 <= s1).then_some((s0, s1))
}

/// Distance from `p` to the segment `[a, b]` and the parameter of the foot.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> (f64, f64) {
    let d = sub(b, a);
    let dd = dot(&d, &d);
    let s = if dd == 0.0 {
        0.0
    } else {
        (dot(&sub(p, a), &d) / dd).clamp(0.0, 1.0)
    };
    (dist(p, &add(a, &scale(&d, s))), s)
}

/// Distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_segment_distance(p0: &Point, p1: &Point, q0: &Point, q1: &Point) -> f64 {
    let d1 = sub(p1, p0);
    let d2 = sub(q1, q0);
    let r = sub(p0, q0);
    let a = dot(&d1, &d1);
    let e = dot(&d2, &d2);
    let f = dot(&d2, &r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return norm(&r);
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(&d1, &r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(&d1, &d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let cp = add(p0, &scale(&d1, s));
    let cq = add(q0, &scale(&d2, t));
    dist(&cp, &cq)
}

fn orient(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: &Point2, b: &Point2, p: &Point2) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Whether the closed planar segments `[a, b]` and `[c, d]` share a point.
pub fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// Signed area of `disk(0, r) ∩ triangle(0, a, b)`.
fn triangle_disk_signed(a: &Point2, b: &Point2, r: f64) -> f64 {
    let r2 = r * r;
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let mut pts: Vec<Point2> = vec![*a];
    if dd > 0.0 {
        let bq = a[0] * d[0] + a[1] * d[1];
        let cq = a[0] * a[0] + a[1] * a[1] - r2;
        let disc = bq * bq - dd * cq;
        if disc > 0.0 {
            let sq = disc.sqrt();
            for s in [(-bq - sq) / dd, (-bq + sq) / dd] {
                if s > 0.0 && s < 1.0 {
                    pts.push([a[0] + s * d[0], a[1] + s * d[1]]);
                }
            }
        }
    }
    pts.push(*b);
    let mut area = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        // endpoints too: a chord tangent to the circle has its midpoint on it
        let near = |x: &Point2| x[0] * x[0] + x[1] * x[1] <= r2 * (1.0 + 1e-9);
        if m[0] * m[0] + m[1] * m[1] <= r2 && near(p) && near(q) {
            area += 0.5 * cross2(p, q);
        } else {
            let angle = cross2(p, q).atan2(p[0] * q[0] + p[1] * q[1]);
            area += 0.5 * r2 * angle;
        }
    }
    area
}

/// Area of the intersection of a simple polygon with the disk `B(c, r)`.
pub fn polygon_disk_area(poly: &[Point2], c: &Point2, r: f64) -> f64 {
    if r <= 0.0 || poly.len() < 3 {
        return 0.0;
    }
    let shifted: Vec<Point2> = poly.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    let n = shifted.len();
    let s: f64 = (0..n)
        .map(|i| triangle_disk_signed(&shifted[i], &shifted[(i + 1) % n], r))
        .sum();
    s.abs()
}

/// Area of the axis-aligned rectangle `[lo, hi]` inside the disk `B(c, r)`.
pub fn rect_disk_area(lo: &Point2, hi: &Point2, c: &Point2, r: f64) -> f64 {
    let far = rect_far_dist2(lo, hi, c);
    if far <= r * r {
        return (hi[0] - lo[0]) * (hi[1] - lo[1]);
    }
    if rect_near_dist2(lo, hi, c) > r * r {
        return 0.0;
    }
    let poly = [*lo, [hi[0], lo[1]], *hi, [lo[0], hi[1]]];
    polygon_disk_area(&poly, c, r)
}

/// Squared distance from `c` to the nearest point of the box `[lo, hi]`.
pub fn rect_near_dist2<const N: usize>(lo: &[f64; N], hi: &[f64; N], c: &[f64; N]) -> f64 {
    (0..N)
        .map(|i| {
            let d = if c[i] < lo[i] {
                lo[i] - c[i]
            } else if c[i] > hi[i] {
                c[i] - hi[i]
            } else {
                0.0
            };
            d * d
        })
        .sum()
}

/// Squared distance from `c` to the farthest corner of the box `[lo, hi]`.
pub fn rect_far_dist2<const N: usize>(lo: &[f64; N], hi: &[f64; N], c: &[f64; N]) -> f64 {
    (0..N)
        .map(|i| {
            let d = (c[i] - lo[i]).abs().max((hi[i] - c[i]).abs());
            d * d
        })
        .sum()
}

/// Area of a triangle in `R^3`.
pub fn triangle_area(tri: &[Point; 3]) -> f64 {
    0.5 * norm(&cross(&sub(&tri[1], &tri[0]), &sub(&tri[2], &tri[0])))
}

/// Area of `triangle ∩ B(c, t)` for a triangle in `R^3`.
pub fn triangle_ball_area(tri: &[Point; 3], c: &Point, t: f64) -> f64 {
    let e1 = sub(&tri[1], &tri[0]);
    let e2 = sub(&tri[2], &tri[0]);
    let n = cross(&e1, &e2);
    let nn = norm(&n);
    if nn == 0.0 {
        return 0.0;
    }
    let n = scale(&n, 1.0 / nn);
    let h = dot(&sub(c, &tri[0]), &n);
    if h.abs() > t {
        return 0.0;
    }
    let rho = (t * t - h * h).max(0.0).sqrt();
    // orthonormal frame in the plane
    let u = scale(&e1, 1.0 / norm(&e1));
    let v = cross(&n, &u);
    let to2 = |p: &Point| {
        let q = sub(p, &tri[0]);
        [dot(&q, &u), dot(&q, &v)]
    };
    let poly = [to2(&tri[0]), to2(&tri[1]), to2(&tri[2])];
    polygon_disk_area(&poly, &to2(c), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn clip_chord() {
        let (s0, s1) =
            segment_ball_clip(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.5, 0.0, 0.0], 0.25).unwrap();
        assert_relative_eq!(s1 - s0, 0.5);
        assert!(segment_ball_clip(&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.5, 0.0, 0.0], 1.0).is_some());
        assert!(segment_ball_clip(&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.5, 0.0, 0.0], 0.99).is_none());
    }

    #[test]
    fn tangent_edge_counts_as_outside() {
        // hypotenuse at distance exactly r from the center
        let t = 0.25 / 2f64.sqrt();
        let tri = [[0.5, 0.25], [0.75, 0.5], [0.5, 0.5]];
        assert_relative_eq!(polygon_disk_area(&tri, &[0.5, 0.5], t), PI * t * t / 4.0, max_relative = 1e-12);
        let tri = [[0.25, 0.5], [0.5, 0.75], [0.25, 0.75]];
        assert!(polygon_disk_area(&tri, &[0.5, 0.5], t) < 1e-15);
    }

    #[test]
    fn disk_areas() {
        let sq = [[-2.0, -2.0], [2.0, -2.0], [2.0, 2.0], [-2.0, 2.0]];
        assert_relative_eq!(polygon_disk_area(&sq, &[0.0, 0.0], 1.0), PI, max_relative = 1e-14);
        // quarter disk
        assert_relative_eq!(
            rect_disk_area(&[0.0, 0.0], &[5.0, 5.0], &[0.0, 0.0], 1.0),
            PI / 4.0,
            max_relative = 1e-14
        );
        // half disk, clockwise input
        let cw = [[-3.0, 0.0], [-3.0, 3.0], [3.0, 3.0], [3.0, 0.0]];
        assert_relative_eq!(polygon_disk_area(&cw, &[0.0, 0.0], 2.0), 2.0 * PI, max_relative = 1e-14);
        // disk contains polygon
        assert_relative_eq!(rect_disk_area(&[0.0, 0.0], &[0.1, 0.2], &[0.0, 0.0], 10.0), 0.02);
    }

    #[test]
    fn circular_segment_area() {
        // disk r = 1 cut by the line x = 0.5: cap area = acos(0.5) - 0.5 sqrt(0.75)
        let cap = (0.5f64).acos() - 0.5 * 0.75f64.sqrt();
        let area = rect_disk_area(&[0.5, -2.0], &[3.0, 2.0], &[0.0, 0.0], 1.0);
        assert_relative_eq!(area, cap, max_relative = 1e-13);
    }

    #[test]
    fn triangle_ball() {
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        assert_relative_eq!(triangle_area(&tri), 0.5);
        assert_relative_eq!(triangle_ball_area(&tri, &[0.0, 0.0, 0.0], 10.0), 0.5, max_relative = 1e-14);
        // sphere cuts the plane in a circle of radius 0.3 around the corner
        let a = triangle_ball_area(&tri, &[0.0, 0.0, 0.4], 0.5);
        assert_relative_eq!(a, PI * 0.09 / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn intersections() {
        assert!(segments_intersect(&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]));
        assert!(!segments_intersect(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]));
        assert!(segments_intersect(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[2.0, 1.0]));
        assert!(segments_intersect(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]));
        let d = segment_segment_distance(
            &[0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[2.0, 1.0, 0.0],
            &[3.0, 5.0, 0.0],
        );
        assert_relative_eq!(d, 2.0f64.sqrt());
    }
}
