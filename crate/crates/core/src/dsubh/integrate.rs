use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::ExtendedReal;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::measures::{Cantor, CantorBase, Grid, MeasureRep, Polyline, Surface};
use crate::quad::integrate_split;

use super::DeltaSubharmonic;

const REL_TARGET: f64 = 1e-4;
const MAX_EVALS: usize = 50_000_000;

/// `∫ U⁺ dμ` with an error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlusIntegral {
    #[serde(with = "extended")]
    pub value: ExtendedReal,
    pub error: f64,
    pub evaluations: usize,
    /// Set when μ charges a negative charge of `U`, where `U⁺ = +∞`.
    pub hits_pole: bool,
}

mod extended {
    use crate::constants::ExtendedReal;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &ExtendedReal, s: S) -> Result<S::Ok, S::Error> {
        match v {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            other => s.serialize_str(&other.to_string()),
        }
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExtendedReal, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(ExtendedReal::Finite(x)),
            Repr::Text(t) if t == "inf" || t == "+inf" => Ok(ExtendedReal::PosInf),
            Repr::Text(t) if t == "-inf" => Ok(ExtendedReal::NegInf),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("not a number: {t}"))),
        }
    }
}

fn finite(value: f64, error: f64, evaluations: usize) -> PlusIntegral {
    PlusIntegral {
        value: ExtendedReal::Finite(value),
        error,
        evaluations,
        hits_pole: false,
    }
}

fn infinite(evaluations: usize) -> PlusIntegral {
    PlusIntegral {
        value: ExtendedReal::PosInf,
        error: 0.0,
        evaluations,
        hits_pole: true,
    }
}

pub fn integrate_plus_against(u: &DeltaSubharmonic, mu: &MeasureRep) -> Result<PlusIntegral> {
    if mu.dim() != u.dim() {
        return Err(Error::Domain(format!(
            "measure lives in dimension {} but the function in {}",
            mu.dim(),
            u.dim()
        )));
    }
    let d = u.dim().as_usize();
    Ok(match mu {
        MeasureRep::Atomic(a) => {
            let mut sum = 0.0;
            for (p, m) in a.atoms() {
                let v = u.plus(&p[..d]);
                if v == f64::INFINITY {
                    return Ok(infinite(a.atoms().len()));
                }
                sum += m * v;
            }
            finite(sum, 0.0, a.atoms().len())
        }
        MeasureRep::PolylineLength(p) => polyline(u, p),
        MeasureRep::GridLebesgue(g) => grid(u, g),
        MeasureRep::TriangulatedArea(s) => surface(u, s),
        MeasureRep::CantorSelfSimilar(c) => cantor(u, c),
    })
}

/// Adaptive Gauss–Kronrod along each segment, with panel boundaries at the
/// feet of the charges.
fn polyline(u: &DeltaSubharmonic, p: &Polyline) -> PlusIntegral {
    let d = u.dim().as_usize();
    let (mut value, mut error, mut evals) = (0.0, 0.0, 0);
    for (a, b) in p.segments() {
        let ab: Vec<f64> = (0..d).map(|i| b[i] - a[i]).collect();
        let len2: f64 = ab.iter().map(|x| x * x).sum();
        let len = len2.sqrt();
        let mut breaks = Vec::new();
        for c in u.positive().iter().chain(u.negative()) {
            let s = (0..d).map(|i| (c.at[i] - a[i]) * ab[i]).sum::<f64>() / len2;
            breaks.push(s);
        }
        // a negative charge on the segment: log-integrable in the plane only
        for c in u.negative() {
            let s = ((0..d).map(|i| (c.at[i] - a[i]) * ab[i]).sum::<f64>() / len2).clamp(0.0, 1.0);
            let dist2: f64 = (0..d).map(|i| (a[i] + s * ab[i] - c.at[i]).powi(2)).sum();
            if dist2 <= (1e-15 * len).powi(2) && d > 2 {
                return infinite(evals);
            }
        }
        let f = |s: f64| {
            let x: Vec<f64> = (0..d).map(|i| a[i] + s * ab[i]).collect();
            u.plus(&x)
        };
        let r = integrate_split(f, 0.0, 1.0, &breaks, 1e-13, REL_TARGET * 1e-2, 20_000);
        value += r.value * len * p.density();
        error += r.error * len * p.density();
        evals += r.evaluations;
    }
    finite(value, error, evals)
}

/// Midpoint sums on `m^d` subcells, Richardson-extrapolated in `m`.
fn refine<F: Fn(usize) -> (f64, usize)>(sum_at: F, cost_per_level: usize) -> PlusIntegral {
    let mut m = 1;
    let (mut prev, mut evals) = sum_at(m);
    let mut prev_rich = f64::NAN;
    let mut error = f64::INFINITY;
    let mut best = prev;
    while evals.saturating_add(cost_per_level.saturating_mul((2 * m).pow(3))) <= MAX_EVALS {
        m *= 2;
        let (cur, e) = sum_at(m);
        evals += e;
        let rich = (4.0 * cur - prev) / 3.0;
        let diff = if prev_rich.is_nan() { (cur - prev).abs() } else { (rich - prev_rich).abs() };
        best = rich;
        error = diff;
        if diff <= REL_TARGET * 0.1 * rich.abs().max(1e-300) || diff <= 1e-14 {
            break;
        }
        prev = cur;
        prev_rich = rich;
    }
    finite(best, error, evals)
}

fn grid(u: &DeltaSubharmonic, g: &Grid) -> PlusIntegral {
    let d = u.dim().as_usize();
    let cells = g.cells();
    let dens = g.densities();
    let vol = g.cell_volume();
    if cells.is_empty() {
        return finite(0.0, 0.0, 0);
    }
    let sum_at = |m: usize| -> (f64, usize) {
        let sub = m.pow(d as u32);
        let parts: Vec<f64> = cells
            .par_iter()
            .zip(dens)
            .map(|(c, rho)| {
                let (lo, hi) = g.cell_box(c);
                let mut s = 0.0;
                for k in 0..sub {
                    let mut x = [0.0; 3];
                    let mut kk = k;
                    for i in 0..d {
                        let j = kk % m;
                        kk /= m;
                        x[i] = lo[i] + (hi[i] - lo[i]) * (j as f64 + 0.5) / m as f64;
                    }
                    s += u.plus(&x[..d]);
                }
                rho * vol * s / sub as f64
            })
            .collect();
        (parts.iter().sum(), cells.len() * sub)
    };
    let r = refine(sum_at, cells.len());
    if r.value.to_f64().is_infinite() {
        return infinite(r.evaluations);
    }
    r
}

fn surface(u: &DeltaSubharmonic, s: &Surface) -> PlusIntegral {
    let tris = s.triangles();
    let sum_at = |m: usize| -> (f64, usize) {
        let parts: Vec<f64> = tris
            .par_iter()
            .map(|t| {
                let area = crate::geom::triangle_area(t);
                let at = |bu: f64, bv: f64| -> Point {
                    let mut x = [0.0; 3];
                    for i in 0..3 {
                        x[i] = t[0][i] + bu * (t[1][i] - t[0][i]) + bv * (t[2][i] - t[0][i]);
                    }
                    x
                };
                let mf = m as f64;
                let mut sum = 0.0;
                for i in 0..m {
                    for j in 0..(m - i) {
                        sum += u.plus(&at((i as f64 + 1.0 / 3.0) / mf, (j as f64 + 1.0 / 3.0) / mf));
                        if i + j + 1 < m {
                            sum += u.plus(&at((i as f64 + 2.0 / 3.0) / mf, (j as f64 + 2.0 / 3.0) / mf));
                        }
                    }
                }
                area * sum / (m * m) as f64
            })
            .collect();
        (parts.iter().sum(), tris.len() * m * m)
    };
    refine(sum_at, tris.len())
}

/// Mass-weighted values at piece centers; `|U⁺(x) - U⁺(center)|` is bounded
/// by the gradient bound of `U` on the piece times its radius.
fn cantor(u: &DeltaSubharmonic, c: &Cantor) -> PlusIntegral {
    let d = u.dim().as_usize();
    let square = matches!(c.base(), CantorBase::Square { .. });
    let branch: u64 = if square { 4 } else { 2 };
    let cap = if square { 10 } else { 20 };
    let top = c.level().min(cap);
    let mut j = top.min(if square { 5 } else { 8 });
    let mut evals = 0;
    loop {
        let pieces = c.pieces(j);
        let mass = c.mass / branch.pow(j) as f64;
        let parts: Vec<(f64, f64)> = pieces
            .par_iter()
            .map(|(lo, s)| {
                let (center, rho) = if square {
                    ([lo[0] + s / 2.0, lo[1] + s / 2.0], s / std::f64::consts::SQRT_2)
                } else {
                    ([lo[0] + s / 2.0, lo[1]], s / 2.0)
                };
                let x = [center[0], center[1], 0.0];
                let v = u.plus(&x[..d]);
                let g = u.gradient_bound(&x[..d], rho);
                (mass * v, mass * g * rho)
            })
            .collect();
        evals += pieces.len();
        let value: f64 = parts.iter().map(|p| p.0).sum();
        let error: f64 = parts.iter().map(|p| p.1).sum();
        if value.is_infinite() {
            return infinite(evals);
        }
        if error <= REL_TARGET * value.abs() || j >= top {
            return finite(value, error, evals);
        }
        j = (j + 2).min(top);
    }
}
