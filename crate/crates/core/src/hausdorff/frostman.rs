use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constants::Dimension;
use crate::gauge::{Gauge, GaugeKind};
use crate::measures::{Atomic, MeasureRep, PowerBound};

use super::raster::Raster;
use super::set::CompactSet;

/// Exported Frostman measures are coarsened to at most this many atoms.
const MAX_ATOMS: usize = 200_000;

/// Finest level whose block masses are computed on a dense array.
const DENSE_LEVEL: u32 = 10;

/// Largest block side, in cells, for the dense block bounds.
const MAX_BLOCK: usize = 12;

/// A measure on the set, dominated by the gauge up to the constant `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frostman {
    /// Mass of the normalized measure, `μ(S) / c`.
    pub lower: f64,
    /// Certified constant with `h_μ(t) ≤ c·h(t)` for all `t > 0`, before
    /// normalization; infinite when the natural measure of the set has atoms
    /// the gauge cannot dominate.
    pub constant: f64,
    /// Bounds for `h_μ(t)/h(t)` on consecutive ranges of `t ≥ ℓ_k/2`.
    pub level_ratios: Vec<f64>,
    /// Contribution of scales below one cell.
    pub fine_ratio: f64,
    /// Constant with `h_ν(t) ≤ atomic_constant · h(t)` for the exported
    /// atoms `ν` and all `t ≥ atom_scale`.
    pub atomic_constant: f64,
    pub atom_scale: f64,
    /// Normalized measure as atoms at points of the set (one per cell of the
    /// coarsest level with at most `MAX_ATOMS` cells).
    pub measure: MeasureRep,
}

fn morton(c: [u32; 2]) -> u64 {
    let spread = |v: u32| {
        let mut x = v as u64;
        x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
        x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
        x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
        x = (x | (x << 2)) & 0x3333_3333_3333_3333;
        x = (x | (x << 1)) & 0x5555_5555_5555_5555;
        x
    };
    spread(c[0]) | (spread(c[1]) << 1)
}

/// Largest logarithmic slope of `h` on `(0, t]`.
fn sup_log_slope_below(h: &Gauge, t: f64) -> f64 {
    match &h.kind {
        GaugeKind::Power { p, .. } => *p,
        GaugeKind::PowerLog { p, q, .. } => {
            if *q >= 0.0 {
                *p
            } else {
                p - q / (1.0 + (h.radius / t.min(h.radius)).ln())
            }
        }
        GaugeKind::Tabulated { nodes } => {
            let mut m: f64 = 0.0;
            for i in 0..nodes.len() - 1 {
                if nodes[i].0 < t || i == 0 {
                    let e = (nodes[i + 1].1 / nodes[i].1).ln() / (nodes[i + 1].0 / nodes[i].0).ln();
                    m = m.max(e);
                }
            }
            m
        }
    }
}

/// Rigorous upper bound for `sup_{0 < t ≤ T} a t^q / h(t)`.
pub(crate) fn sup_ratio(bound: &PowerBound, h: &Gauge, big_t: f64) -> f64 {
    let (a, q) = (bound.b, bound.p);
    if let GaugeKind::Power { b, p } = h.kind {
        return if q >= p { a * big_t.powf(q) / (b * big_t.powf(p)) } else { f64::INFINITY };
    }
    // on [t_{i+1}, t_i]: a t^q / h(t) ≤ a t_i^q / h(t_{i+1})
    let step = 2f64.powf(-1.0 / 8.0);
    let mut sup: f64 = 0.0;
    let mut ti = big_t;
    for _ in 0..1600 {
        let next = ti * step;
        let hv = h.eval(next);
        if hv <= 0.0 {
            return f64::INFINITY;
        }
        sup = sup.max(a * ti.powf(q) / hv);
        ti = next;
    }
    // below the grid h(t) ≥ h(t_min) (t / t_min)^s with s the largest slope
    if q >= sup_log_slope_below(h, ti) {
        sup.max(a * ti.powf(q) / h.eval(ti))
    } else {
        f64::INFINITY
    }
}

/// Heaviest `(n+1)×(n+1)` block of an `n_side`-square array, for `n = 1..=max`.
fn dense_blocks(lm: &HashMap<[u32; 2], f64>, n_side: usize, max: usize) -> Vec<f64> {
    let w = n_side + 1;
    let mut pre = vec![0.0f64; w * w];
    for (c, m) in lm {
        pre[(c[0] as usize + 1) * w + c[1] as usize + 1] += m;
    }
    for x in 1..w {
        for y in 1..w {
            pre[x * w + y] += pre[(x - 1) * w + y] + pre[x * w + y - 1] - pre[(x - 1) * w + y - 1];
        }
    }
    let rect = |x0: usize, y0: usize, x1: usize, y1: usize| {
        pre[x1 * w + y1] - pre[x0 * w + y1] - pre[x1 * w + y0] + pre[x0 * w + y0]
    };
    (1..=max)
        .map(|n| {
            let s = (n + 1).min(n_side);
            let mut best: f64 = 0.0;
            for x in 0..=(n_side - s) {
                for y in 0..=(n_side - s) {
                    best = best.max(rect(x, y, x + s, y + s));
                }
            }
            // rounding in the prefix sums
            best * (1.0 + 1e-12)
        })
        .collect()
}

/// Heaviest 2×2 block of a sparse array.
fn sparse_block(lm: &HashMap<[u32; 2], f64>) -> f64 {
    let get = |a: i64, b: i64| -> f64 {
        if a < 0 || b < 0 {
            return 0.0;
        }
        lm.get(&[a as u32, b as u32]).copied().unwrap_or(0.0)
    };
    let mut block: f64 = 0.0;
    for c in lm.keys() {
        let (a, b) = (c[0] as i64, c[1] as i64);
        for da in -1..=0 {
            for db in -1..=0 {
                let s = get(a + da, b + db) + get(a + da + 1, b + db) + get(a + da, b + db + 1) + get(a + da + 1, b + db + 1);
                block = block.max(s);
            }
        }
    }
    block * (1.0 + 1e-12)
}

/// Upper bound for `sup_{lo ≤ t ≤ hi} a t^q / h(t)`.
fn range_ratio(bound: &PowerBound, h: &Gauge, lo: f64, hi: f64) -> f64 {
    let (a, q) = (bound.b, bound.p);
    if !hi.is_finite() {
        return f64::INFINITY;
    }
    if let GaugeKind::Power { b, p } = h.kind {
        let t = if q >= p { hi } else { lo };
        return a * t.powf(q) / (b * t.powf(p));
    }
    let n = 16;
    let step = (hi / lo).powf(1.0 / n as f64);
    let mut sup: f64 = 0.0;
    let mut t = lo;
    for _ in 0..n {
        let next = (t * step).min(hi);
        sup = sup.max(a * next.powf(q) / h.eval(t));
        t = next;
    }
    sup
}

pub fn frostman(set: &CompactSet, raster: &Raster, h: &Gauge) -> Frostman {
    let k = raster.k;
    let mut order: Vec<usize> = (0..raster.cells.len()).collect();
    order.sort_by_key(|&i| morton(raster.cells[i]));
    let cells: Vec<[u32; 2]> = order.iter().map(|&i| raster.cells[i]).collect();
    let lam: Vec<f64> = order.iter().map(|&i| raster.weight[i]).collect();
    let codes: Vec<u64> = cells.iter().map(|&c| morton(c)).collect();
    let lam_max = lam.iter().copied().fold(0.0, f64::max);
    let hk = h.eval(raster.ell(k) / 2.0);
    let mut mass: Vec<f64> = lam.iter().map(|l| hk * l / lam_max).collect();

    // descendants of a level-j cell form a contiguous Morton run
    let runs = |j: u32| -> Vec<(usize, usize)> {
        let shift = 2 * (k - j);
        let mut out = Vec::new();
        let mut s = 0;
        for i in 1..=codes.len() {
            if i == codes.len() || codes[i] >> shift != codes[s] >> shift {
                out.push((s, i));
                s = i;
            }
        }
        out
    };
    for j in (0..k).rev() {
        let cap = h.eval(raster.ell(j) / 2.0);
        for (s, e) in runs(j) {
            let tot: f64 = mass[s..e].iter().sum();
            if tot > cap {
                let f = cap / tot;
                for m in &mut mass[s..e] {
                    *m *= f;
                }
            }
        }
    }
    let total: f64 = mass.iter().sum();

    // A ball of radius t < nℓ_j/2 meets at most an (n+1)×(n+1) block of
    // level-j cells, so its mass is at most the heaviest such block B_{j,n}.
    // Sorting the breakpoints τ = nℓ_j/2, on [τ_a, τ_{a+1}) the ratio
    // h_μ(t)/h(t) is below min_{τ ≥ τ_{a+1}} B / h(τ_a).
    let mut bps: Vec<(f64, f64, u32)> = vec![(f64::INFINITY, total, 0)];
    for j in 0..=k {
        let shift = k - j;
        let mut lm: HashMap<[u32; 2], f64> = HashMap::new();
        for (c, m) in cells.iter().zip(&mass) {
            *lm.entry([c[0] >> shift, c[1] >> shift]).or_default() += m;
        }
        let ell = raster.ell(j);
        if j <= DENSE_LEVEL {
            for (n, b) in dense_blocks(&lm, 1usize << j, MAX_BLOCK).into_iter().enumerate() {
                bps.push(((n + 1) as f64 * ell / 2.0, b, j));
            }
        } else {
            bps.push((ell / 2.0, sparse_block(&lm), j));
        }
    }
    bps.sort_by(|x, y| x.0.total_cmp(&y.0));
    // suffix minima of block masses
    let mut suffix = vec![f64::INFINITY; bps.len() + 1];
    for i in (0..bps.len()).rev() {
        suffix[i] = suffix[i + 1].min(bps[i].1);
    }
    // inside a cell the mass has density ρ_Q with respect to λ, so
    // h_μ(t) ≤ ρ_max h_λ(t) at every scale
    let rho_max = mass
        .iter()
        .zip(&lam)
        .map(|(m, l)| m / l)
        .fold(0.0, f64::max);
    let natural = set.natural_modulus();
    let mut level_ratios = Vec::with_capacity(bps.len());
    for i in 0..bps.len() - 1 {
        let (lo, hi) = (bps[i].0, bps[i + 1].0);
        if hi > lo {
            let blocks = suffix[i + 1].min(total) / h.eval(lo);
            let density = natural
                .as_ref()
                .map_or(f64::INFINITY, |b| rho_max * range_ratio(b, h, lo, hi));
            level_ratios.push(blocks.min(density));
        }
    }
    let fine_ratio = match &natural {
        Some(b) => rho_max * sup_ratio(b, h, raster.ell(k) / 2.0),
        None => f64::INFINITY,
    };
    let constant = level_ratios
        .iter()
        .copied()
        .fold(1.0f64, f64::max)
        .max(fine_ratio);
    let lower = if constant.is_finite() { total / constant } else { 0.0 };

    // export: coarsen until the atom count is acceptable
    let mut jexp = k;
    while jexp > 0 && runs(jexp).len() > MAX_ATOMS {
        jexp -= 1;
    }
    // atoms sit inside their level-jexp cells, so only the block bounds of
    // levels up to jexp apply to them, and only for t ≥ ℓ_jexp / 2
    let atom_scale = raster.ell(jexp) / 2.0;
    let coarse: Vec<&(f64, f64, u32)> = bps.iter().filter(|b| b.2 <= jexp).collect();
    let mut atom_ratio: f64 = 0.0;
    let mut best = total;
    for i in (0..coarse.len() - 1).rev() {
        best = best.min(coarse[i + 1].1);
        let lo = coarse[i].0;
        if coarse[i + 1].0 > lo && lo >= atom_scale * (1.0 - 1e-12) {
            atom_ratio = atom_ratio.max(best / h.eval(lo));
        }
    }
    let atomic_constant = if constant.is_finite() { (atom_ratio / constant).max(1.0) } else { f64::INFINITY };
    let mut atoms = Vec::new();
    if constant.is_finite() {
        for (s, e) in runs(jexp) {
            let m: f64 = mass[s..e].iter().sum::<f64>() / constant;
            if m > 0.0 {
                let c = cells[s];
                let p = point_in_cell(set, raster, jexp, [c[0] >> (k - jexp), c[1] >> (k - jexp)]);
                atoms.push(([p[0], p[1], 0.0], m));
            }
        }
    }
    let measure = MeasureRep::Atomic(Atomic::new(Dimension::PLANE, atoms).expect("positive atoms"));
    Frostman {
        lower,
        constant,
        level_ratios,
        fine_ratio,
        atomic_constant,
        atom_scale,
        measure,
    }
}

/// A point of the set in the closed cell, found by projecting a grid of
/// points of the cell; the projected center is the fallback.
fn point_in_cell(set: &CompactSet, raster: &Raster, j: u32, c: [u32; 2]) -> [f64; 2] {
    let (lo, hi) = raster.cell_rect(j, c);
    let inside = |p: &[f64; 2]| p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1];
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let first = set.project(&center);
    if inside(&first) {
        return first;
    }
    for a in 0..=4 {
        for b in 0..=4 {
            let q = [lo[0] + (hi[0] - lo[0]) * a as f64 / 4.0, lo[1] + (hi[1] - lo[1]) * b as f64 / 4.0];
            let p = set.project(&q);
            if inside(&p) {
                return p;
            }
        }
    }
    first
}
