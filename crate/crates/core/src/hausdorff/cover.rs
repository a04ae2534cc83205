use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::gauge::Gauge;
use crate::geom::Point2;

use super::raster::Raster;
use super::set::{cantor_pieces, d2, CompactSet};

/// Covers longer than this are summarized rather than listed.
pub const MAX_LISTED: usize = 500_000;

/// Finest level used by the greedy set cover.
const GREEDY_LEVEL: u32 = 7;

/// Radius of the balls around isolated points.
const POINT_RADIUS: f64 = 1e-150;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point2,
    pub radius: f64,
}

/// A cover of the set by closed balls with its cost `Σ h(r_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub method: String,
    pub cost: f64,
    pub count: u64,
    pub balls: Vec<Ball>,
    /// True when `balls` lists only the first `MAX_LISTED` of `count`.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
enum Plan {
    Enclosing(Point2, f64),
    Points(f64),
    Triadic(u32),
    Segments(f64),
    ArcPieces(u64),
    Uniform(u32),
    /// `(level, cell, multiple)` triples in level-`k` grid units.
    Greedy(Vec<(u32, [u32; 2], u32)>),
}

/// Smallest enclosing circle (Welzl, iterative form) of a point list.
fn min_enclosing_circle(pts: &[Point2]) -> (Point2, f64) {
    let circle2 = |a: &Point2, b: &Point2| ([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0], d2(a, b) / 2.0);
    let circle3 = |a: &Point2, b: &Point2, c: &Point2| {
        let (bx, by) = (b[0] - a[0], b[1] - a[1]);
        let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
        let d = 2.0 * (bx * cy - by * cx);
        if d.abs() < 1e-300 {
            // collinear: the widest pair
            let cands = [circle2(a, b), circle2(a, c), circle2(b, c)];
            return cands.into_iter().max_by(|x, y| x.1.total_cmp(&y.1)).expect("three");
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        let center = [a[0] + ux, a[1] + uy];
        (center, (ux * ux + uy * uy).sqrt())
    };
    // deterministic scramble keeps the expected running time linear
    let mut p: Vec<Point2> = pts.to_vec();
    let n = p.len();
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for i in (1..n).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        p.swap(i, (state % (i as u64 + 1)) as usize);
    }
    let inside = |c: &(Point2, f64), q: &Point2| d2(&c.0, q) <= c.1 * (1.0 + 1e-12);
    let mut c = (p[0], 0.0);
    for i in 1..n {
        if inside(&c, &p[i]) {
            continue;
        }
        c = (p[i], 0.0);
        for j in 0..i {
            if inside(&c, &p[j]) {
                continue;
            }
            c = circle2(&p[i], &p[j]);
            for k in 0..j {
                if !inside(&c, &p[k]) {
                    c = circle3(&p[i], &p[j], &p[k]);
                }
            }
        }
    }
    c
}

fn enclosing_ball(set: &CompactSet) -> (Point2, f64) {
    let hull = set.hull_points();
    let center = if hull.len() <= 4000 {
        min_enclosing_circle(&hull).0
    } else {
        let (lo, hi) = set.bounding_box();
        [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0]
    };
    (center, set.max_dist_from(&center))
}

fn cantor_geometry(set: &CompactSet) -> Option<(u32, Point2, f64, bool)> {
    match set {
        CompactSet::Cantor {
            level,
            start,
            length,
        } => Some((*level, *start, *length, false)),
        CompactSet::CantorDust { level, lo, side } => Some((*level, *lo, *side, true)),
        _ => None,
    }
}

fn triadic_radius(size: f64, j: u32, square: bool) -> f64 {
    let s = size / 3f64.powi(j as i32);
    if square {
        s * FRAC_1_SQRT_2
    } else {
        s / 2.0
    }
}

/// Circumradius of a level-`j` cell.
fn cell_radius(r: &Raster, j: u32) -> f64 {
    r.ell(j) * FRAC_1_SQRT_2
}

struct Ctx<'a> {
    set: &'a CompactSet,
    raster: &'a Raster,
    h: &'a Gauge,
    t: f64,
}

impl Ctx<'_> {
    fn segment_pieces(&self, rho: f64) -> Vec<(f64, f64)> {
        self.set
            .segments()
            .iter()
            .map(|(a, b)| {
                let l = d2(a, b);
                let m = (l / (2.0 * rho)).ceil().max(1.0);
                (m, l / (2.0 * m))
            })
            .collect()
    }

    fn plans(&self) -> Vec<(Plan, f64, u64)> {
        let (h, t, r) = (self.h, self.t, self.raster);
        let mut out = Vec::new();
        // analytic refinements stop at the first feasible radius below the
        // raster scale, so that the resolution bounds every family
        let fine = cell_radius(r, r.k) / 2.0;
        let (c, rad) = enclosing_ball(self.set);
        if rad < t {
            out.push((Plan::Enclosing(c, rad), h.eval(rad), 1));
        }
        match self.set {
            CompactSet::Point { .. } | CompactSet::Points { .. } => {
                let n = self.set.natural_total();
                let rr = POINT_RADIUS.min(t / 2.0);
                out.push((Plan::Points(rr), n * h.eval(rr), n as u64));
            }
            _ => {}
        }
        if let Some((level, _, size, square)) = cantor_geometry(self.set) {
            let base: f64 = if square { 4.0 } else { 2.0 };
            for j in 0..=level {
                let rr = triadic_radius(size, j, square);
                if rr < t {
                    let n = base.powi(j as i32);
                    out.push((Plan::Triadic(j), n * h.eval(rr), n as u64));
                    if rr < fine {
                        break;
                    }
                }
            }
        }
        let segs = self.set.segments();
        if !segs.is_empty() {
            let mut rho = segs.iter().map(|(a, b)| d2(a, b)).fold(0.0, f64::max) / 2.0;
            for _ in 0..48 {
                if rho < t {
                    let pieces = self.segment_pieces(rho);
                    let cost = pieces.iter().map(|(m, rr)| m * h.eval(*rr)).sum();
                    let n = pieces.iter().map(|p| p.0).sum::<f64>();
                    out.push((Plan::Segments(rho), cost, n as u64));
                    if rho < fine {
                        break;
                    }
                }
                rho /= 2.0;
            }
        }
        if let CompactSet::Arc {
            radius, start, end, ..
        } = self.set
        {
            let mut m = 1u64;
            for _ in 0..40 {
                let th = (end - start) / m as f64;
                let rr = radius * (th / 2.0).sin();
                if th <= PI && rr < t {
                    out.push((Plan::ArcPieces(m), m as f64 * h.eval(rr), m));
                    if rr < fine {
                        break;
                    }
                }
                m *= 2;
            }
        }
        for j in 0..=r.k {
            let rr = cell_radius(r, j);
            if rr < t {
                let n = r.occupied_at(j).len() as f64;
                out.push((Plan::Uniform(j), n * h.eval(rr), n as u64));
            }
        }
        if cell_radius(r, r.k) >= t {
            // finer than the raster: all subcells of occupied cells
            let mut j = r.k + 1;
            while cell_radius(r, j) >= t && j < r.k + 60 {
                j += 1;
            }
            let n = r.cells.len() as f64 * 4f64.powi((j - r.k) as i32);
            out.push((Plan::Uniform(j), n * h.eval(cell_radius(r, j)), n as u64));
        }
        if let Some((plan, cost, n)) = self.greedy() {
            out.push((plan, cost, n));
        }
        out
    }

    fn greedy(&self) -> Option<(Plan, f64, u64)> {
        let r = self.raster;
        let w = r.k.min(GREEDY_LEVEL);
        let elems = r.occupied_at(w);
        let index: HashMap<[u32; 2], u32> =
            elems.iter().enumerate().map(|(i, c)| (*c, i as u32)).collect();
        let s = (1u64 << (r.k - w)) as f64;
        let grid_n = (1u64 << w) as i64;
        let mut cands: Vec<(u32, [u32; 2], u32)> = Vec::new();
        let mut costs = Vec::new();
        let mut covers: Vec<Vec<u32>> = Vec::new();
        for j in 0..=w {
            for c in r.occupied_at(j) {
                for m in 1..=3u32 {
                    let rr = cell_radius(r, j) * m as f64;
                    if rr >= self.t {
                        continue;
                    }
                    let unit = (1u64 << (r.k - j)) as f64;
                    let cx = (c[0] as f64 + 0.5) * unit;
                    let cy = (c[1] as f64 + 0.5) * unit;
                    let rad2 = unit * unit * (m * m) as f64 / 2.0;
                    let rad = rad2.sqrt();
                    let range = |x: f64| {
                        let a = (((x - rad) / s).floor() as i64).max(0);
                        let b = (((x + rad) / s).floor() as i64).min(grid_n - 1);
                        a..=b
                    };
                    let mut cov = Vec::new();
                    for ex in range(cx) {
                        for ey in range(cy) {
                            let Some(&idx) = index.get(&[ex as u32, ey as u32]) else {
                                continue;
                            };
                            let (x0, x1) = (ex as f64 * s, (ex + 1) as f64 * s);
                            let (y0, y1) = (ey as f64 * s, (ey + 1) as f64 * s);
                            let fx = (cx - x0).abs().max((x1 - cx).abs());
                            let fy = (cy - y0).abs().max((y1 - cy).abs());
                            if fx * fx + fy * fy <= rad2 {
                                cov.push(idx);
                            }
                        }
                    }
                    if !cov.is_empty() {
                        cands.push((j, c, m));
                        costs.push(self.h.eval(rr));
                        covers.push(cov);
                    }
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        #[derive(PartialEq)]
        struct Key(f64, std::cmp::Reverse<usize>);
        impl Eq for Key {}
        impl PartialOrd for Key {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Key {
            fn cmp(&self, o: &Self) -> Ordering {
                self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
            }
        }
        let ratio = |gain: usize, cost: f64| if cost > 0.0 { gain as f64 / cost } else { f64::INFINITY };
        let mut heap: BinaryHeap<Key> = (0..cands.len())
            .map(|i| Key(ratio(covers[i].len(), costs[i]), std::cmp::Reverse(i)))
            .collect();
        let mut count = vec![0u32; elems.len()];
        let mut uncovered = elems.len();
        let mut chosen: Vec<usize> = Vec::new();
        while uncovered > 0 {
            let Key(_, std::cmp::Reverse(i)) = heap.pop()?;
            let gain = covers[i].iter().filter(|&&e| count[e as usize] == 0).count();
            if gain == 0 {
                continue;
            }
            let key = Key(ratio(gain, costs[i]), std::cmp::Reverse(i));
            if let Some(top) = heap.peek() {
                if key < *top {
                    heap.push(key);
                    continue;
                }
            }
            for &e in &covers[i] {
                if count[e as usize] == 0 {
                    uncovered -= 1;
                }
                count[e as usize] += 1;
            }
            chosen.push(i);
        }
        // reverse delete, most expensive first
        let mut order = chosen.clone();
        order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(b.cmp(&a)));
        let mut keep = vec![true; cands.len()];
        for i in order {
            if covers[i].iter().all(|&e| count[e as usize] >= 2) {
                keep[i] = false;
                for &e in &covers[i] {
                    count[e as usize] -= 1;
                }
            }
        }
        let picked: Vec<usize> = chosen.into_iter().filter(|&i| keep[i]).collect();
        let cost = picked.iter().map(|&i| costs[i]).sum();
        let n = picked.len() as u64;
        Some((Plan::Greedy(picked.iter().map(|&i| cands[i]).collect()), cost, n))
    }

    fn build(&self, plan: &Plan) -> (String, Vec<Ball>, bool) {
        let r = self.raster;
        let mut balls = Vec::new();
        let mut truncated = false;
        let mut push = |b: Ball, balls: &mut Vec<Ball>| {
            if balls.len() < MAX_LISTED {
                balls.push(b);
            } else {
                truncated = true;
            }
        };
        let name = match plan {
            Plan::Enclosing(c, rad) => {
                push(Ball { center: *c, radius: *rad }, &mut balls);
                "enclosing ball".to_string()
            }
            Plan::Points(rad) => {
                for p in self.set.hull_points() {
                    push(Ball { center: p, radius: *rad }, &mut balls);
                }
                "point balls".to_string()
            }
            Plan::Triadic(j) => {
                let (level, lo, size, square) = cantor_geometry(self.set).expect("Cantor set");
                let rad = triadic_radius(size, *j, square);
                for (p, s) in cantor_pieces(level, lo, size, square, (*j).min(20)) {
                    let y = if square { p[1] + s / 2.0 } else { p[1] };
                    push(Ball { center: [p[0] + s / 2.0, y], radius: rad }, &mut balls);
                }
                format!("triadic level {j}")
            }
            Plan::Segments(rho) => {
                let segs = self.set.segments();
                for ((a, b), (m, rad)) in segs.iter().zip(self.segment_pieces(*rho)) {
                    let m = (m as usize).min(MAX_LISTED + 1);
                    for q in 0..m {
                        let s = (q as f64 + 0.5) / m as f64;
                        let c = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                        push(Ball { center: c, radius: rad }, &mut balls);
                    }
                }
                format!("segment pieces of radius ≤ {rho:e}")
            }
            Plan::ArcPieces(m) => {
                let CompactSet::Arc {
                    center,
                    radius,
                    start,
                    end,
                } = self.set
                else {
                    unreachable!("arc plan on a non-arc")
                };
                let th = (end - start) / *m as f64;
                let rad = radius * (th / 2.0).sin();
                let dist = radius * (th / 2.0).cos();
                for q in 0..(*m).min(MAX_LISTED as u64 + 1) {
                    let mid = start + (q as f64 + 0.5) * th;
                    let c = [center[0] + dist * mid.cos(), center[1] + dist * mid.sin()];
                    push(Ball { center: c, radius: rad }, &mut balls);
                }
                format!("{m} arc pieces")
            }
            Plan::Uniform(j) => {
                let rad = cell_radius(r, *j);
                if *j <= r.k {
                    let l = r.ell(*j);
                    for c in r.occupied_at(*j) {
                        let (lo, _) = r.cell_rect(*j, c);
                        push(Ball { center: [lo[0] + l / 2.0, lo[1] + l / 2.0], radius: rad }, &mut balls);
                    }
                } else {
                    let per = 1u64 << (*j - r.k);
                    let l = r.ell(*j);
                    'outer: for c in &r.cells {
                        let (lo, _) = r.cell_rect(r.k, *c);
                        for a in 0..per {
                            for b in 0..per {
                                if balls.len() >= MAX_LISTED {
                                    truncated = true;
                                    break 'outer;
                                }
                                let center = [lo[0] + (a as f64 + 0.5) * l, lo[1] + (b as f64 + 0.5) * l];
                                balls.push(Ball { center, radius: rad });
                            }
                        }
                    }
                }
                format!("uniform dyadic level {j}")
            }
            Plan::Greedy(list) => {
                for (j, c, m) in list {
                    let unit = (1u64 << (r.k - j)) as f64;
                    let g = [(c[0] as f64 + 0.5) * unit, (c[1] as f64 + 0.5) * unit];
                    push(
                        Ball {
                            center: r.world(g),
                            radius: cell_radius(r, *j) * *m as f64,
                        },
                        &mut balls,
                    );
                }
                "greedy set cover".to_string()
            }
        };
        (name, balls, truncated)
    }
}

/// Cheapest cover among the candidate families with all radii `< t`.
pub fn best_cover(set: &CompactSet, raster: &Raster, h: &Gauge, t: f64) -> Option<Cover> {
    let ctx = Ctx { set, raster, h, t };
    let plans = ctx.plans();
    let (plan, cost, count) = plans
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let (method, balls, truncated) = ctx.build(&plan);
    Some(Cover {
        method,
        cost,
        count,
        balls,
        truncated: truncated || (count as usize) > MAX_LISTED,
    })
}

/// Whether every occupied raster cell lies in one cover ball, or else every
/// sample point of the set lies in the union. Checks `r_j < t` too.
pub fn cover_is_feasible(set: &CompactSet, raster: &Raster, cover: &Cover, t: f64) -> bool {
    if cover.truncated || cover.balls.iter().any(|b| !(b.radius < t)) {
        return false;
    }
    let in_ball = |p: &Point2, b: &Ball| d2(p, &b.center) <= b.radius * (1.0 + 1e-12) + 1e-300;
    let ell = raster.ell(raster.k);
    let samples: Vec<Point2> = match set.trace(ell / 8.0) {
        Some(v) => v,
        None => {
            // two-dimensional sets: cell corners and centers of occupied cells
            let mut v = Vec::new();
            for c in &raster.cells {
                let (lo, hi) = raster.cell_rect(raster.k, *c);
                for p in [lo, hi, [lo[0], hi[1]], [hi[0], lo[1]], [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0]] {
                    v.push(set.project(&p));
                }
            }
            v
        }
    };
    // bucket balls by center; a ball holding p has its center within r_max
    let r_max = cover.balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let cell = (2.0 * r_max).max(1e-300);
    let key = |p: &Point2| [(p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64];
    let mut buckets: HashMap<[i64; 2], Vec<usize>> = HashMap::new();
    for (i, b) in cover.balls.iter().enumerate() {
        buckets.entry(key(&b.center)).or_default().push(i);
    }
    samples.iter().all(|p| {
        let [a, b] = key(p);
        (-1..=1).any(|da| {
            (-1..=1).any(|db| {
                buckets
                    .get(&[a.saturating_add(da), b.saturating_add(db)])
                    .is_some_and(|v| v.iter().any(|&i| in_ball(p, &cover.balls[i])))
            })
        })
    })
}
