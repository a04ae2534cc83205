//! Certified modulus profiles: Dini integral upper bounds and gauge
//! domination checks.

use rayon::prelude::*;

use crate::constants::{Dimension, ExtendedReal};
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::measures::{modulus_with, MeasureRep, ModulusOptions, PowerBound};
use crate::quad::log_grid;

const OCTAVES: u32 = 12;
const PER_OCTAVE: u32 = 4;
/// How far below the grid the small-scale power law is checked.
const TAIL_OCTAVES: i32 = 60;
/// Only the upper bounds are used, so the search may stop at a wider gap.
const SEARCH: ModulusOptions = ModulusOptions {
    rel_gap: 0.05,
    max_evals: 1_000,
    seeds: 128,
};

/// Certified upper bounds of `h_μ` on a geometric grid of `(0, r]`, with the
/// measure's all-scale power bound below the grid.
#[derive(Clone, Debug)]
pub struct ModulusProfile {
    pub ts: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub small: Option<PowerBound>,
    pub total: f64,
}

impl ModulusProfile {
    pub fn new(mu: &MeasureRep, r: f64) -> Self {
        let n = (OCTAVES * PER_OCTAVE + 1) as usize;
        let ts = log_grid(r * 0.5f64.powi(OCTAVES as i32), r, n);
        let bounds: Vec<_> = ts.par_iter().map(|&t| modulus_with(mu, t, &SEARCH)).collect();
        let total = mu.total_mass();
        // h_μ is non-decreasing: carry the running minimum down from the right
        let mut upper: Vec<f64> = bounds.iter().map(|b| b.upper.min(total)).collect();
        for i in (0..upper.len() - 1).rev() {
            upper[i] = upper[i].min(upper[i + 1]);
        }
        ModulusProfile {
            ts,
            upper,
            lower: bounds.iter().map(|b| b.lower).collect(),
            small: mu.small_scale_bound(),
            total,
        }
    }

    /// Upper bound of `∫_0^r h_μ(t) / t^{d-1} dt`: on each grid interval
    /// `h_μ` is at most its value at the right end point.
    pub fn dini_upper(&self, d: Dimension) -> ExtendedReal {
        let k = d.as_f64() - 2.0;
        let t0 = self.ts[0];
        let head = match self.small {
            Some(PowerBound { b, p }) if p > k => b * t0.powf(p - k) / (p - k),
            _ => return ExtendedReal::PosInf,
        };
        let primitive = |a: f64, b: f64| {
            if k == 0.0 {
                (b / a).ln()
            } else {
                (a.powf(-k) - b.powf(-k)) / k
            }
        };
        let body: f64 = self
            .ts
            .windows(2)
            .zip(&self.upper[1..])
            .map(|(w, u)| u * primitive(w[0], w[1]))
            .sum();
        ExtendedReal::Finite(head + body)
    }

    /// Checks `h_μ(t) ≤ h(t)·(1 + tol)` at every grid point, and the
    /// small-scale power law against `h` on a geometric grid below it.
    pub fn check_dominated(&self, h: impl Fn(f64) -> f64, tol: f64) -> Result<()> {
        for (t, u) in self.ts.iter().zip(&self.upper) {
            if *u > h(*t) * (1.0 + tol) {
                return Err(Error::Domain(format!(
                    "modulus bound {u:e} exceeds the gauge value {:e} at t = {t:e}",
                    h(*t)
                )));
            }
        }
        let t0 = self.ts[0];
        for j in 1..=TAIL_OCTAVES {
            let t = t0 * 0.5f64.powi(j);
            let bound = match self.small {
                Some(pb) => pb.eval(t).min(self.total),
                None => self.total,
            };
            if bound > h(t) * (1.0 + tol) {
                return Err(Error::Domain(format!(
                    "small-scale modulus bound {bound:e} exceeds the gauge value {:e} at t = {t:e}",
                    h(t)
                )));
            }
        }
        Ok(())
    }

    /// A tabulated gauge dominating `h_μ` on `[t_0, r]`: the node at `t_i`
    /// carries the bound valid at `t_{i+1}`.
    pub fn dominating_gauge(&self) -> Result<Gauge> {
        let n = self.ts.len();
        let mut nodes = Vec::with_capacity(n);
        let mut last: f64 = 0.0;
        for i in 0..n {
            let v = self.upper[(i + 1).min(n - 1)];
            let v = v.max(last).max(f64::MIN_POSITIVE);
            nodes.push((self.ts[i], v));
            last = v;
        }
        Gauge::tabulated(nodes)
    }
}
