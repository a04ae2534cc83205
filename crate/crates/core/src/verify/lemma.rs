//! Grid checks that the maps entering the content substitution are
//! non-decreasing on `[0, h(r)]`.

use serde::{Deserialize, Serialize};

use crate::constants::Dimension;
use crate::error::{Error, Result};
use crate::gauge::{gauge_inverse, slope_s, Gauge};

/// Outcome of a monotonicity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub points: usize,
    /// Largest drop `f(x_i) - f(x_{i+1})` relative to `max |f|`.
    pub worst_drop: f64,
    pub monotone: bool,
}

pub const NOISE: f64 = 1e-12;

/// `x ↦ x / (h⁻¹(x))^{d-2}` for `d > 2`, and `x ↦ x ln(B e^{s_h} / h⁻¹(x))`
/// for `d = 2`, with value 0 at `x = 0`.
pub fn substitution_map(h: &Gauge, d: Dimension, big_b: f64) -> Result<impl Fn(f64) -> Result<f64> + '_> {
    let s = slope_s(h, d)
        .value()
        .ok_or_else(|| Error::Inadmissible(format!("no finite slope constant in dimension {d}")))?;
    let k = d.as_f64() - 2.0;
    Ok(move |x: f64| {
        if x == 0.0 {
            return Ok(0.0);
        }
        let y = gauge_inverse(h, x)?;
        Ok(if k == 0.0 {
            x * (big_b * s.exp() / y).ln()
        } else {
            x / y.powf(k)
        })
    })
}

/// Scans `n + 1` equally spaced points of `[0, h(r)]`.
pub fn lemma2_check(h: &Gauge, d: Dimension, r: f64, big_b: f64, n: usize) -> Result<MonotoneCheck> {
    let f = substitution_map(h, d, big_b)?;
    let top = h.eval(r);
    let vals = (0..=n)
        .map(|i| f(top * i as f64 / n as f64))
        .collect::<Result<Vec<f64>>>()?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let worst = vals
        .windows(2)
        .map(|w| (w[0] - w[1]) / scale)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MonotoneCheck {
        points: n + 1,
        worst_drop: worst,
        monotone: worst <= NOISE,
    })
}
