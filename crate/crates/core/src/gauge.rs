//! Gauge functions `h` with `h(0) = 0`: evaluation, logarithmic slope
//! constant, generalized inverse and the Dini-type integral
//! `int_0^x h(t) / t^(d-1) dt`.

use serde::{Deserialize, Serialize};

use crate::constants::{Dimension, ExtendedReal};
use crate::error::{Error, Result};
use crate::quad;

const INVERSE_REL_TOL: f64 = 1e-12;
const INVERSE_MAX_ITER: usize = 200;

/// Functional form of a gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeKind {
    /// `h(x) = b x^p` on the whole half-line.
    Power { b: f64, p: f64 },
    /// `h(x) = b x^p (1 + ln(r/x))^q` on `(0, r]`, constant `h(r)` beyond.
    PowerLog { b: f64, p: f64, q: f64 },
    /// Monotone sample table `(x_i, h(x_i))` with log-log interpolation
    /// between nodes, the first segment's power law below `x_1`, and the
    /// constant `h(x_n)` beyond the last node.
    Tabulated { nodes: Vec<(f64, f64)> },
}

/// An admissible gauge together with the radius `r` of its working domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    #[serde(flatten)]
    pub kind: GaugeKind,
    /// Domain radius; `f64::INFINITY` is allowed for power gauges.
    #[serde(default = "infinite_radius", with = "radius_serde")]
    pub radius: f64,
}

fn infinite_radius() -> f64 {
    f64::INFINITY
}

mod radius_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &f64, s: S) -> Result<S::Ok, S::Error> {
        if r.is_finite() {
            s.serialize_f64(*r)
        } else {
            s.serialize_str("inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Radius {
            Num(f64),
            Text(String),
        }
        match Radius::deserialize(d)? {
            Radius::Num(x) => Ok(x),
            Radius::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
            Radius::Text(t) => Err(serde::de::Error::custom(format!("bad radius {t:?}"))),
        }
    }
}

/// The slope constant `s_h = 1 / (inf t h'(t)/h(t) - (d-2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeConstant {
    /// `+inf` when the gauge is inadmissible for this dimension.
    pub s: ExtendedReal,
    /// `inf_{0<t<r} t h'(t) / h(t)`.
    pub inf_log_slope: f64,
    pub admissible: bool,
    /// Set for tabulated gauges, whose infimum is taken over grid segments.
    pub grid_approximate: bool,
}

impl SlopeConstant {
    pub fn value(&self) -> Option<f64> {
        self.s.finite()
    }
}

impl Gauge {
    pub fn power(b: f64, p: f64) -> Result<Self> {
        Self::new(GaugeKind::Power { b, p }, f64::INFINITY)
    }

    /// Normalized power gauge `c_p x^p` of the `p`-dimensional contents.
    pub fn hausdorff(p: f64) -> Result<Self> {
        Self::power(crate::constants::c_p(p)?, p)
    }

    pub fn new(kind: GaugeKind, radius: f64) -> Result<Self> {
        let g = Gauge { kind, radius };
        g.validate()?;
        Ok(g)
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.validate()?;
        Ok(self)
    }

    /// Piecewise power-law gauge through the given samples. A flat first
    /// segment gives `h(0+) > 0`, as for moduli of measures with atoms; such a
    /// gauge is never admissible.
    pub fn tabulated(nodes: Vec<(f64, f64)>) -> Result<Self> {
        let radius = nodes.last().map(|n| n.0).unwrap_or(0.0);
        Self::new(GaugeKind::Tabulated { nodes }, radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::Domain(format!("gauge radius must be positive, got {}", self.radius)));
        }
        match &self.kind {
            GaugeKind::Power { b, p } => {
                if !(*b > 0.0 && *p > 0.0) {
                    return Err(Error::Domain(format!("power gauge needs b, p > 0 (b={b}, p={p})")));
                }
            }
            GaugeKind::PowerLog { b, p, q } => {
                if !self.radius.is_finite() {
                    return Err(Error::Domain("power-log gauge needs a finite radius".into()));
                }
                if !(*b > 0.0 && *p > 0.0 && p - q.max(0.0) > 0.0) {
                    return Err(Error::Domain(format!(
                        "power-log gauge needs b > 0 and p > max(q, 0) (b={b}, p={p}, q={q})"
                    )));
                }
            }
            GaugeKind::Tabulated { nodes } => {
                if nodes.len() < 2 {
                    return Err(Error::Domain("tabulated gauge needs at least two nodes".into()));
                }
                for w in nodes.windows(2) {
                    if !(w[1].0 > w[0].0) || w[1].1 < w[0].1 {
                        return Err(Error::Domain(
                            "tabulated gauge nodes must have increasing x and non-decreasing h".into(),
                        ));
                    }
                }
                if !(nodes[0].0 > 0.0 && nodes[0].1 > 0.0) {
                    return Err(Error::Domain("tabulated gauge nodes must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// `h(x)` for `x >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            GaugeKind::Power { b, p } => b * x.powf(*p),
            GaugeKind::PowerLog { b, p, q } => {
                let x = x.min(self.radius);
                b * x.powf(*p) * (1.0 + (self.radius / x).ln()).powf(*q)
            }
            GaugeKind::Tabulated { nodes } => {
                let (i, e) = segment_of(nodes, x);
                if x >= nodes[nodes.len() - 1].0 {
                    return nodes[nodes.len() - 1].1;
                }
                let (x0, y0) = nodes[i];
                y0 * (x / x0).powf(e)
            }
        }
    }

    /// Logarithmic derivative `t h'(t) / h(t)` from the right.
    pub fn log_slope(&self, t: f64) -> f64 {
        match &self.kind {
            GaugeKind::Power { p, .. } => *p,
            GaugeKind::PowerLog { p, q, .. } => {
                if t >= self.radius {
                    0.0
                } else {
                    p - q / (1.0 + (self.radius / t).ln())
                }
            }
            GaugeKind::Tabulated { nodes } => {
                if t >= nodes[nodes.len() - 1].0 {
                    0.0
                } else {
                    segment_of(nodes, t).1
                }
            }
        }
    }

    /// Right derivative `h'(t+)`.
    pub fn right_derivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return match &self.kind {
                GaugeKind::Power { b, p } if *p == 1.0 => *b,
                GaugeKind::Power { p, .. } if *p > 1.0 => 0.0,
                _ => f64::INFINITY,
            };
        }
        self.log_slope(t) * self.eval(t) / t
    }

    /// `h(r)`, or `+inf` for an unbounded domain.
    pub fn max_value(&self) -> f64 {
        if self.radius.is_finite() {
            self.eval(self.radius)
        } else {
            f64::INFINITY
        }
    }
}

/// Index of the segment containing `x` and its log-log exponent.
fn segment_of(nodes: &[(f64, f64)], x: f64) -> (usize, f64) {
    let n = nodes.len();
    let i = match nodes.binary_search_by(|probe| probe.0.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(n - 2),
    };
    (i, segment_exponent(nodes, i))
}

fn segment_exponent(nodes: &[(f64, f64)], i: usize) -> f64 {
    let (x0, y0) = nodes[i];
    let (x1, y1) = nodes[i + 1];
    (y1 / y0).ln() / (x1 / x0).ln()
}

/// Slope constant of `h` in dimension `d`.
pub fn slope_s(h: &Gauge, d: Dimension) -> SlopeConstant {
    let (inf, grid_approximate) = match &h.kind {
        GaugeKind::Power { p, .. } => (*p, false),
        GaugeKind::PowerLog { p, q, .. } => (p - q.max(0.0), false),
        GaugeKind::Tabulated { nodes } => {
            let inf = (0..nodes.len() - 1)
                .filter(|&i| nodes[i].0 < h.radius)
                .map(|i| segment_exponent(nodes, i))
                .fold(f64::INFINITY, f64::min);
            (inf, true)
        }
    };
    let excess = inf - (d.as_f64() - 2.0);
    if excess > 0.0 {
        SlopeConstant {
            s: ExtendedReal::Finite(1.0 / excess),
            inf_log_slope: inf,
            admissible: true,
            grid_approximate,
        }
    } else {
        SlopeConstant {
            s: ExtendedReal::PosInf,
            inf_log_slope: inf,
            admissible: false,
            grid_approximate,
        }
    }
}

/// The unique `x in [0, r]` with `h(x) = m`.
pub fn gauge_inverse(h: &Gauge, m: f64) -> Result<f64> {
    if m < 0.0 || m.is_nan() {
        return Err(Error::Domain(format!("gauge inverse needs m >= 0, got {m}")));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let max = h.max_value();
    if m > max * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::OutOfRange { value: m, max });
    }
    if let GaugeKind::Power { b, p } = h.kind {
        return Ok((m / b).powf(1.0 / p));
    }
    if m >= max {
        return Ok(h.radius);
    }
    let (mut lo, mut hi) = (0.0, h.radius);
    for _ in 0..INVERSE_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let v = h.eval(mid);
        if (v - m).abs() <= INVERSE_REL_TOL * m {
            return Ok(mid);
        }
        if v < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `int_0^x h(t) / t^(d-1) dt`, `+inf` when divergent at the origin.
pub fn dini_integral(h: &Gauge, d: Dimension, x: f64) -> ExtendedReal {
    if x <= 0.0 {
        return ExtendedReal::ZERO;
    }
    let k = d.as_f64() - 2.0;
    match &h.kind {
        GaugeKind::Power { b, p } => {
            if *p > k {
                ExtendedReal::Finite(b * x.powf(p - k) / (p - k))
            } else {
                ExtendedReal::PosInf
            }
        }
        GaugeKind::Tabulated { nodes } => tabulated_dini(nodes, k, x),
        GaugeKind::PowerLog { b, p, q } => {
            let r = h.radius;
            let head = x.min(r);
            let tail = if x > r {
                h.eval(r) * power_primitive(k, r, x)
            } else {
                0.0
            };
            let log0 = 1.0 + (r / head).ln();
            let excess = p - k;
            if excess < 0.0 || (excess == 0.0 && *q >= -1.0) {
                return ExtendedReal::PosInf;
            }
            if excess == 0.0 {
                return ExtendedReal::Finite(b * log0.powf(q + 1.0) / (-q - 1.0) + tail);
            }
            // t = head * exp(-u)
            let f = |u: f64| b * head.powf(excess) * (-excess * u).exp() * (log0 + u).powf(*q);
            let mut upper = 40.0 / excess;
            while f(upper) > 1e-18 * f(0.0) && upper < 1e4 {
                upper *= 2.0;
            }
            let res = quad::integrate(f, 0.0, upper, 1e-15, 1e-13, 2000);
            ExtendedReal::Finite(res.value + tail)
        }
    }
}

/// `int_a^b t^(1-d) dt` written with `k = d - 2`.
fn power_primitive(k: f64, a: f64, b: f64) -> f64 {
    if k == 0.0 {
        (b / a).ln()
    } else {
        (a.powf(-k) - b.powf(-k)) / k
    }
}

fn tabulated_dini(nodes: &[(f64, f64)], k: f64, x: f64) -> ExtendedReal {
    let e0 = segment_exponent(nodes, 0);
    if e0 <= k {
        return ExtendedReal::PosInf;
    }
    // below the first node: y0 (t/x0)^e0
    let (x0, y0) = nodes[0];
    let first = x.min(x0);
    let mut total = y0 * x0.powf(-e0) * first.powf(e0 - k) / (e0 - k);
    for i in 0..nodes.len() - 1 {
        let (a, ya) = nodes[i];
        let b = nodes[i + 1].0.min(x);
        if b <= a {
            break;
        }
        let e = segment_exponent(nodes, i);
        // int_a^b ya (t/a)^e t^(1-d) dt
        let s = e - k;
        total += if s.abs() < 1e-14 {
            ya * a.powf(-e) * (b / a).ln()
        } else {
            ya * a.powf(-e) * (b.powf(s) - a.powf(s)) / s
        };
    }
    let (xn, yn) = nodes[nodes.len() - 1];
    if x > xn {
        total += yn * power_primitive(k, xn, x);
    }
    ExtendedReal::Finite(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn slope_of_power_gauges() {
        let s = slope_s(&Gauge::power(1.0, 1.0).unwrap(), dim(2));
        assert_eq!(s.value(), Some(1.0));
        let s = slope_s(&Gauge::power(3.0, 2.0).unwrap(), dim(3));
        assert_eq!(s.value(), Some(1.0));
        let s = slope_s(&Gauge::power(1.0, 1.0).unwrap(), dim(3));
        assert!(!s.admissible);
        assert_eq!(s.s, ExtendedReal::PosInf);
    }

    #[test]
    fn inverse_examples() {
        let h = Gauge::power(PI, 2.0).unwrap();
        assert_relative_eq!(gauge_inverse(&h, PI / 4.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(gauge_inverse(&Gauge::power(1.0, 1.0).unwrap(), 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            gauge_inverse(&Gauge::power(2.0, 3.0).unwrap(), 2.0).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        let bounded = Gauge::power(1.0, 1.0).unwrap().with_radius(1.0).unwrap();
        assert!(matches!(
            gauge_inverse(&bounded, 2.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn dini_examples() {
        let d2 = dim(2);
        assert_eq!(dini_integral(&Gauge::power(1.0, 1.0).unwrap(), d2, 1.0), ExtendedReal::Finite(1.0));
        assert_eq!(dini_integral(&Gauge::power(1.0, 2.0).unwrap(), dim(3), 2.0), ExtendedReal::Finite(2.0));
        let h = Gauge::power(1.0, 0.5).unwrap();
        let v = dini_integral(&h, d2, 1.0).finite().unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-15);
        let s = slope_s(&h, d2).value().unwrap();
        assert!(v <= s * h.eval(1.0) * (1.0 + 1e-15));
        assert_eq!(dini_integral(&Gauge::power(1.0, 1.0).unwrap(), dim(3), 1.0), ExtendedReal::PosInf);
    }

    #[test]
    fn power_log_gauge() {
        let h = Gauge::new(GaugeKind::PowerLog { b: 1.0, p: 1.5, q: 1.0 }, 1.0).unwrap();
        assert_relative_eq!(h.eval(1.0), 1.0);
        assert_eq!(h.eval(2.0), h.eval(1.0));
        let s = slope_s(&h, dim(2));
        assert_relative_eq!(s.value().unwrap(), 1.0 / 0.5);
        // int_0^1 t^0.5 (1 + ln(1/t)) dt = 2/3 + 4/9
        let v = dini_integral(&h, dim(2), 1.0).finite().unwrap();
        assert_relative_eq!(v, 10.0 / 9.0, max_relative = 1e-10);
        let x = gauge_inverse(&h, 0.3).unwrap();
        assert_relative_eq!(h.eval(x), 0.3, max_relative = 1e-11);
    }

    #[test]
    fn tabulated_matches_power_law() {
        let nodes: Vec<(f64, f64)> = (1..=10).map(|i| (0.1 * i as f64, 2.0 * (0.1 * i as f64).powf(1.5))).collect();
        let h = Gauge::tabulated(nodes).unwrap();
        let p = Gauge::power(2.0, 1.5).unwrap();
        for x in [0.01, 0.15, 0.37, 0.99] {
            assert_relative_eq!(h.eval(x), p.eval(x), max_relative = 1e-12);
        }
        let s = slope_s(&h, dim(2));
        assert!(s.grid_approximate);
        assert_relative_eq!(s.inf_log_slope, 1.5, max_relative = 1e-12);
        for d in [2, 3] {
            let a = dini_integral(&h, dim(d), 0.8).finite().unwrap();
            let b = dini_integral(&p, dim(d), 0.8).finite().unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // constant extension
        assert_eq!(h.eval(3.0), h.eval(1.0));
        let x = gauge_inverse(&h, 1.0).unwrap();
        assert_relative_eq!(h.eval(x), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gauge_serde_round_trip() {
        let h = Gauge::new(GaugeKind::Power { b: 2.0, p: 1.0 }, 1.5).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<Gauge>(&json).unwrap(), h);
        let unbounded: Gauge = serde_json::from_str(r#"{"kind":"power","b":1,"p":2}"#).unwrap();
        assert!(unbounded.radius.is_infinite());
    }
}
