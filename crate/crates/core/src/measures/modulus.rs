use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::geom::Point;

use super::atomic::exact_planar_modulus;
use super::MeasureRep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMode {
    Exact,
    Certified,
}

/// Certified enclosure `lower ≤ sup_y μ(B̄_y(t)) ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusBound {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub mode: ModulusMode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusOptions {
    /// Stop once `(upper - lower) / upper` falls below this.
    pub rel_gap: f64,
    /// Budget of ball-mass evaluations for the box search.
    pub max_evals: usize,
    /// Number of support points used to seed the lower bound.
    pub seeds: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        ModulusOptions {
            rel_gap: 0.01,
            max_evals: 40_000,
            seeds: 2_000,
        }
    }
}

pub fn modulus_of_continuity(mu: &MeasureRep, t: f64) -> ModulusBound {
    modulus_with(mu, t, &ModulusOptions::default())
}

pub fn modulus_with(mu: &MeasureRep, t: f64, opts: &ModulusOptions) -> ModulusBound {
    let t = t.max(0.0);
    let total = mu.total_mass();
    let exact = |v: f64| ModulusBound {
        t,
        lower: v,
        upper: v,
        mode: ModulusMode::Exact,
    };
    let Some((_, radius)) = mu.enclosing_ball() else {
        return exact(0.0);
    };
    if t >= radius || t >= mu.support_radius() {
        return exact(total);
    }
    match mu {
        MeasureRep::Atomic(a) if a.dim.get() == 2 => {
            if let Some(v) = exact_planar_modulus(a, t) {
                return exact(v.min(total));
            }
        }
        MeasureRep::PolylineLength(p) if p.is_straight() => {
            return exact((2.0 * t * p.density).min(total));
        }
        _ => {}
    }
    if t == 0.0 && !matches!(mu, MeasureRep::Atomic(_)) {
        return exact(0.0);
    }
    branch_and_bound(mu, t, opts)
}

struct BoxNode {
    lo: Point,
    hi: Point,
    upper: f64,
}

impl PartialEq for BoxNode {
    fn eq(&self, o: &Self) -> bool {
        self.upper == o.upper
    }
}
impl Eq for BoxNode {}
impl PartialOrd for BoxNode {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for BoxNode {
    fn cmp(&self, o: &Self) -> Ordering {
        self.upper.total_cmp(&o.upper)
    }
}

/// Search over boxes of centers. For a box with center `c` and half-diagonal
/// `ρ`, every center in the box has its ball inside `B̄(c, t + ρ)`.
fn branch_and_bound(mu: &MeasureRep, t: f64, opts: &ModulusOptions) -> ModulusBound {
    let total = mu.total_mass();
    let n = mu.dim().as_usize();
    let (mut lo, mut hi) = mu.bounding_box().expect("non-empty support");
    for a in 0..n {
        lo[a] -= t;
        hi[a] += t;
    }
    let mut evals = 0usize;
    let mut best: f64 = 0.0;
    for p in mu.sample_points(opts.seeds) {
        best = best.max(mu.ball_mass_bounds(&p, t).lower);
        evals += 1;
    }
    let node = |lo: Point, hi: Point, best: &mut f64, evals: &mut usize| -> BoxNode {
        let mut c = [0.0; 3];
        let mut r2 = 0.0;
        for a in 0..n {
            c[a] = 0.5 * (lo[a] + hi[a]);
            r2 += (0.5 * (hi[a] - lo[a])).powi(2);
        }
        let rho = r2.sqrt();
        *best = best.max(mu.ball_mass_bounds(&c, t).lower);
        let upper = mu.ball_mass_bounds(&c, t + rho).upper.min(total);
        *evals += 2;
        BoxNode { lo, hi, upper }
    };
    let mut heap = BinaryHeap::new();
    heap.push(node(lo, hi, &mut best, &mut evals));
    let mut pruned: f64 = 0.0;
    // the all-scale power law is itself a certified upper bound
    let cap = mu.small_scale_bound().map_or(total, |s| s.eval(t)).min(total);
    let done = |upper: f64, best: f64| upper <= best * (1.0 + opts.rel_gap) || upper - best <= 1e-14 * total;
    while let Some(top) = heap.peek() {
        let global = top.upper.max(pruned).min(cap);
        if done(global, best) || evals >= opts.max_evals {
            break;
        }
        let top = heap.pop().expect("peeked");
        let axis = (0..n)
            .max_by(|&a, &b| (top.hi[a] - top.lo[a]).total_cmp(&(top.hi[b] - top.lo[b])))
            .expect("n ≥ 2");
        let mid = 0.5 * (top.lo[axis] + top.hi[axis]);
        let mut h1 = top.hi;
        h1[axis] = mid;
        let mut l2 = top.lo;
        l2[axis] = mid;
        for (l, h) in [(top.lo, h1), (l2, top.hi)] {
            let child = node(l, h, &mut best, &mut evals);
            if child.upper <= best * (1.0 + opts.rel_gap) {
                pruned = pruned.max(child.upper);
            } else {
                heap.push(child);
            }
        }
    }
    let upper = heap
        .peek()
        .map_or(0.0, |b| b.upper)
        .max(pruned)
        .min(cap)
        .max(best);
    ModulusBound {
        t,
        lower: best.min(upper),
        upper,
        mode: ModulusMode::Certified,
    }
}

/// Moduli at several radii, tightened by monotonicity in `t`: the lower bounds
/// are replaced by running maxima and the upper bounds by running minima.
pub fn modulus_profile(mu: &MeasureRep, ts: &[f64]) -> Vec<ModulusBound> {
    use rayon::prelude::*;
    let mut out: Vec<ModulusBound> = ts.par_iter().map(|&t| modulus_of_continuity(mu, t)).collect();
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
    let mut run: f64 = 0.0;
    for &i in &order {
        run = run.max(out[i].lower);
        out[i].lower = run;
    }
    let mut run = f64::INFINITY;
    for &i in order.iter().rev() {
        run = run.min(out[i].upper);
        out[i].upper = run.max(out[i].lower);
    }
    out
}
