//! Upper and lower bounds for h-contents of planar compact sets.

mod cover;
mod frostman;
mod raster;
mod set;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::constants::c_p;
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::measures::MeasureRep;

pub use cover::{best_cover, cover_is_feasible, Ball, Cover, MAX_LISTED};
pub use frostman::{frostman, Frostman};
pub use raster::Raster;
pub use set::CompactSet;

/// Dyadic resolution used when none is given.
pub const DEFAULT_RESOLUTION: u32 = 10;

/// Bounds `lower ≤ m_h^t(S) ≤ upper` with the objects realizing them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentEstimate {
    pub gauge: Gauge,
    /// Cover radius; `f64::INFINITY` serializes as `null`.
    pub t: Option<f64>,
    pub resolution: u32,
    pub upper: f64,
    pub lower: f64,
    pub cover: Cover,
    pub frostman: Option<Frostman>,
}

impl ContentEstimate {
    pub fn radius(&self) -> f64 {
        self.t.unwrap_or(f64::INFINITY)
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("cover radius must be positive, got {t}")));
    }
    Ok(())
}

fn upper_on(set: &CompactSet, raster: &Raster, h: &Gauge, t: f64) -> Result<Cover> {
    best_cover(set, raster, h, t).ok_or_else(|| {
        Error::Unsupported(format!("no cover with radii below {t:e} at resolution {}", raster.k))
    })
}

/// Cheapest feasible cover found with all radii `< t`. The lower bound is
/// left at zero.
pub fn content_upper(set: &CompactSet, h: &Gauge, t: f64, k: u32) -> Result<ContentEstimate> {
    check_t(t)?;
    let raster = Raster::new(set, k)?;
    let cover = upper_on(set, &raster, h, t)?;
    Ok(ContentEstimate {
        gauge: h.clone(),
        t: t.is_finite().then_some(t),
        resolution: k,
        upper: cover.cost,
        lower: 0.0,
        cover,
        frostman: None,
    })
}

/// Lower bound from a dyadic Frostman measure. The content is monotone in
/// `t`, so the bound holds for every cover radius.
pub fn frostman_lower(set: &CompactSet, h: &Gauge, k: u32) -> Result<Frostman> {
    let raster = Raster::new(set, k)?;
    Ok(frostman(set, &raster, h))
}

/// Both bounds on one raster.
pub fn content(set: &CompactSet, h: &Gauge, t: f64, k: u32) -> Result<ContentEstimate> {
    check_t(t)?;
    let raster = Raster::new(set, k)?;
    let cover = upper_on(set, &raster, h, t)?;
    let f = frostman(set, &raster, h);
    Ok(ContentEstimate {
        gauge: h.clone(),
        t: t.is_finite().then_some(t),
        resolution: k,
        upper: cover.cost,
        lower: f.lower.min(cover.cost),
        cover,
        frostman: Some(f),
    })
}

/// Content for the normalized power gauge `c_p x^p`.
pub fn p_content(set: &CompactSet, p: f64, t: f64, k: u32) -> Result<ContentEstimate> {
    let h = Gauge::power(c_p(p)?, p)?;
    content(set, &h, t, k)
}

/// Upper bounds for a list of radii. Since `m_h^t` is non-increasing in `t`,
/// the bound at `t` may be replaced by the smallest bound found at any
/// `t' ≤ t`.
pub fn content_upper_profile(set: &CompactSet, h: &Gauge, ts: &[f64], k: u32) -> Result<Vec<f64>> {
    let raster = Raster::new(set, k)?;
    let raw = ts
        .iter()
        .map(|&t| {
            check_t(t)?;
            Ok(upper_on(set, &raster, h, t)?.cost)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ts
        .iter()
        .map(|&t| {
            ts.iter()
                .zip(&raw)
                .filter(|(s, _)| **s <= t)
                .map(|(_, v)| *v)
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub ts: Vec<Option<f64>>,
    /// Cost of the cheapest cover found at each radius.
    pub raw: Vec<f64>,
    /// Whether `raw` is non-decreasing as `t` shrinks, within `tol`.
    pub raw_monotone: bool,
    pub tol: f64,
}

/// Checks that the upper bounds do not decrease as the cover radius shrinks.
/// `ts` must be decreasing.
pub fn content_monotonicity_check(set: &CompactSet, h: &Gauge, ts: &[f64], k: u32) -> Result<MonotonicityReport> {
    if ts.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("radii must be strictly decreasing".into()));
    }
    let raster = Raster::new(set, k)?;
    let raw = ts
        .iter()
        .map(|&t| {
            check_t(t)?;
            Ok(upper_on(set, &raster, h, t)?.cost)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tol = 1e-9;
    let raw_monotone = raw.windows(2).all(|w| w[1] >= w[0] * (1.0 - tol) - tol);
    Ok(MonotonicityReport {
        ts: ts.iter().map(|t| t.is_finite().then_some(*t)).collect(),
        raw,
        raw_monotone,
        tol,
    })
}

/// The closed support of a planar measure as a compact set.
pub fn support(mu: &MeasureRep) -> Result<CompactSet> {
    CompactSet::support_of(mu)
}
