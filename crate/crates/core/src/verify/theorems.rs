//! Right-hand sides of the inequalities and the records built from them.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use crate::constants::{c_p, constant_a, hat_d, Dimension, ExtendedReal};
use crate::dsubh::{integrate_plus_against, nevanlinna_t, CharacteristicValue, DeltaSubharmonic};
use crate::error::{Error, Result};
use crate::gauge::{gauge_inverse, slope_s, Gauge};
use crate::hausdorff::{content_upper, frostman_lower, CompactSet};
use crate::measures::{lipschitz_constants, radial_counting_n, MeasureRep};

use super::bounds::ModulusProfile;
use super::case::{Geometry, Sweep, VerificationCase};
use super::lemma::lemma2_check;
use super::restrict::restrict_to_ball;
use super::{factor_product, passes, Factor, Settings, TheoremId, VerificationRecord};

/// Candidate centers for the supremum of the counting function.
const SUP_CANDIDATES: usize = 64;
/// Grid size of the monotonicity scans.
const LEMMA_POINTS: usize = 1000;

struct Sides {
    lhs: f64,
    lhs_err: f64,
    t: CharacteristicValue,
    /// Lower end of the characteristic's error bar: the harder direction.
    t_low: f64,
}

fn sides(u: &DeltaSubharmonic, mu: Option<&MeasureRep>, r: f64, big_r: f64) -> Result<Sides> {
    let (lhs, lhs_err) = match mu {
        None => (0.0, 0.0),
        Some(mu) => {
            let i = integrate_plus_against(u, mu)?;
            (i.value.to_f64(), i.error)
        }
    };
    let t = nevanlinna_t(u, r, big_r)?;
    let t_low = (t.value - t.error).max(0.0);
    Ok(Sides {
        lhs,
        lhs_err,
        t,
        t_low,
    })
}

struct Draft {
    label: String,
    theorem: TheoremId,
    r: f64,
    big_r: f64,
    factors: Vec<Factor>,
    caveats: Vec<String>,
    details: BTreeMap<String, f64>,
    /// Side conditions that must hold for the record to count as ok.
    assertions_ok: bool,
}

impl Draft {
    fn new(label: String, theorem: TheoremId, r: f64, big_r: f64) -> Self {
        Draft {
            label,
            theorem,
            r,
            big_r,
            factors: Vec::new(),
            caveats: Vec::new(),
            details: BTreeMap::new(),
            assertions_ok: true,
        }
    }

    fn detail(&mut self, k: &str, v: f64) {
        self.details.insert(k.to_string(), v);
    }

    fn caveat(&mut self, c: &str) {
        if !self.caveats.iter().any(|x| x == c) {
            self.caveats.push(c.to_string());
        }
    }

    fn finish(mut self, s: &Sides, tol: f64) -> VerificationRecord {
        let rhs = factor_product(&self.factors);
        let ratio = if rhs > 0.0 {
            s.lhs / rhs
        } else if s.lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.detail("T_value", s.t.value);
        self.detail("T_error", s.t.error);
        self.detail("T_mean_term", s.t.mean_term);
        self.detail("T_counting_term", s.t.counting_term);
        if s.t.stochastic {
            self.caveat("stochastic-T");
        }
        let ok = s.lhs.is_finite() && self.assertions_ok && passes(s.lhs, s.lhs_err, rhs, tol);
        VerificationRecord {
            label: self.label,
            theorem: self.theorem,
            r: self.r,
            big_r: self.big_r,
            lhs: s.lhs,
            lhs_err: s.lhs_err,
            rhs,
            factors: self.factors,
            ratio,
            ok,
            tolerance: tol,
            caveats: self.caveats,
            details: self.details,
            ms: None,
        }
    }
}

fn dims(case: &VerificationCase) -> Result<Dimension> {
    let d = case.mu.dim();
    if case.u.dim() != d {
        return Err(Error::Domain(format!(
            "function lives in dimension {} but the measure in dimension {d}",
            case.u.dim()
        )));
    }
    let planar = d.get() == 2;
    let needs = match case.theorem {
        TheoremId::T2C | TheoremId::T5C | TheoremId::CorCurve | TheoremId::CorCurveSweep => Some(true),
        TheoremId::T2D | TheoremId::T5D | TheoremId::CorSurf => Some(false),
        _ => None,
    };
    if needs.is_some_and(|p| p != planar) {
        return Err(Error::Domain(format!("{} does not apply in dimension {d}", case.theorem)));
    }
    Ok(d)
}

fn fixed(case: &VerificationCase) -> Result<(f64, f64)> {
    match case.geometry {
        Geometry::Fixed { r, big_r } => Ok((r, big_r)),
        Geometry::Sweep(_) => Err(Error::Parse(format!("{} needs r and R, not a sweep", case.theorem))),
    }
}

fn sweep(case: &VerificationCase) -> Result<&Sweep> {
    match &case.geometry {
        Geometry::Sweep(s) => Ok(s),
        Geometry::Fixed { .. } => Err(Error::Parse(format!("{} needs a sweep", case.theorem))),
    }
}

fn check_support(mu: &MeasureRep, r: f64) -> Result<()> {
    let rho = mu.support_radius();
    if rho > r * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "the measure reaches radius {rho} outside the closed ball of radius {r}"
        )));
    }
    Ok(())
}

/// Outer radius `R = r + s(r)` of a sweep step.
fn sweep_outer(s: &Sweep, r: f64) -> Result<(f64, f64)> {
    let sr = s.s.eval(r);
    if !(r > 0.0 && sr > 0.0 && sr.is_finite()) {
        return Err(Error::Domain(format!("need r > 0 and s(r) > 0, got r = {r}, s(r) = {sr}")));
    }
    Ok((sr, r + sr))
}

fn sweep_label(label: &str, r: f64) -> String {
    format!("{label}@r={r}")
}

fn in_sweep<T>(r: f64, res: Result<T>) -> Result<T> {
    res.map_err(|e| Error::Domain(format!("at r = {r}: {e}")))
}

fn content_set(case: &VerificationCase) -> Result<CompactSet> {
    match &case.set {
        Some(s) => Ok(s.clone()),
        None => CompactSet::support_of(&case.mu),
    }
}

fn content_radius(case: &VerificationCase, r: f64) -> Result<f64> {
    let t = case.t.unwrap_or(r);
    if !(t >= r) {
        return Err(Error::Domain(format!("content radius t = {t} must be at least r = {r}")));
    }
    Ok(t)
}

fn log_or_inf(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).ln()
    }
}

// ---------------------------------------------------------------- T1

fn t1_factors(d: Dimension, r: f64, big_r: f64, t_low: f64, m: f64, dini: f64) -> Result<Vec<Factor>> {
    let a = constant_a(d, r, big_r)?;
    let hd = hat_d(d) as f64;
    let k = d.as_f64() - 2.0;
    Ok(vec![
        Factor::new("A_d", a),
        Factor::new("T_U", t_low),
        Factor::new("mass_and_modulus", m * r.powf(-k).max(1.0) + hd * dini),
    ])
}

fn t1_record(
    label: String,
    theorem: TheoremId,
    u: &DeltaSubharmonic,
    mu: Option<&MeasureRep>,
    r: f64,
    big_r: f64,
    tol: f64,
) -> Result<VerificationRecord> {
    let d = u.dim();
    let (m, dini) = match mu {
        None => (0.0, 0.0),
        Some(mu) => {
            check_support(mu, r)?;
            let profile = ModulusProfile::new(mu, r);
            let dini = profile.dini_upper(d).finite().ok_or_else(|| {
                Error::Domain(
                    "Dini condition fails: the modulus integral diverges at the origin".into(),
                )
            })?;
            (mu.total_mass(), dini)
        }
    };
    let s = sides(u, mu, r, big_r)?;
    let mut dr = Draft::new(label, theorem, r, big_r);
    dr.factors = t1_factors(d, r, big_r, s.t_low, m, dini)?;
    dr.detail("M", m);
    dr.detail("modulus_integral_upper", dini);
    Ok(dr.finish(&s, tol))
}

pub fn verify_t1(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    dims(case)?;
    let tol = settings.tolerance;
    match &case.geometry {
        Geometry::Fixed { r, big_r } => Ok(vec![t1_record(
            case.label.clone(),
            case.theorem,
            &case.u,
            Some(&case.mu),
            *r,
            *big_r,
            tol,
        )?]),
        Geometry::Sweep(sw) => sw
            .radii
            .iter()
            .map(|&r| {
                in_sweep(r, {
                    let (_, big_r) = sweep_outer(sw, r)?;
                    let part = restrict_to_ball(&case.mu, r)?;
                    t1_record(
                        sweep_label(&case.label, r),
                        case.theorem,
                        &case.u,
                        part.measure.as_ref(),
                        r,
                        big_r,
                        tol,
                    )
                    .map(|mut rec| {
                        if !part.exact {
                            rec.caveats.push("inner-part".into());
                        }
                        rec
                    })
                })
            })
            .collect(),
    }
}

// ---------------------------------------------------------------- T2

fn t2_factors(
    d: Dimension,
    r: f64,
    big_r: f64,
    t_low: f64,
    m: f64,
    h: &Gauge,
    s_h: f64,
) -> Result<(Vec<Factor>, f64)> {
    let x = gauge_inverse(h, m)?;
    let f = if d.get() == 2 {
        vec![
            Factor::new("prefactor", 5.0 * (big_r + r) / (big_r - r)),
            Factor::new("T_U", t_low),
            Factor::new("M", m),
            Factor::new("log_factor", log_or_inf((1.0 + s_h).exp() * r, x)),
        ]
    } else {
        let k = d.as_f64() - 2.0;
        vec![
            Factor::new("A_d", constant_a(d, r, big_r)?),
            Factor::new("T_U", t_low),
            Factor::new("M", m),
            Factor::new("gauge_factor", 1.0 + (1.0 + k * s_h) / x.powf(k)),
        ]
    };
    Ok((f, x))
}

struct GaugeSetup {
    h: Gauge,
    s_h: f64,
    grid_slope: bool,
}

fn gauge_setup(case: &VerificationCase, d: Dimension, r: f64, tol: f64) -> Result<GaugeSetup> {
    let h = case
        .gauge
        .clone()
        .ok_or_else(|| Error::Parse(format!("{} needs a gauge", case.theorem)))?;
    if h.radius < r {
        return Err(Error::Domain(format!(
            "gauge domain radius {} is smaller than r = {r}",
            h.radius
        )));
    }
    let slope = slope_s(&h, d);
    let s_h = slope.value().ok_or_else(|| {
        Error::Inadmissible(format!(
            "inf t h'(t)/h(t) = {} does not exceed d - 2 = {}",
            slope.inf_log_slope,
            d.get() - 2
        ))
    })?;
    check_support(&case.mu, r)?;
    ModulusProfile::new(&case.mu, r).check_dominated(|t| h.eval(t), tol)?;
    Ok(GaugeSetup {
        h,
        s_h,
        grid_slope: slope.grid_approximate,
    })
}

pub fn verify_t2(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let (r, big_r) = fixed(case)?;
    let tol = settings.tolerance;
    let g = gauge_setup(case, d, r, tol)?;
    let m = case.mu.total_mass();
    let s = sides(&case.u, Some(&case.mu), r, big_r)?;
    let mut dr = Draft::new(case.label.clone(), case.theorem, r, big_r);
    let (factors, x) = t2_factors(d, r, big_r, s.t_low, m, &g.h, g.s_h)?;
    dr.factors = factors;
    dr.detail("M", m);
    dr.detail("s_h", g.s_h);
    dr.detail("h_inverse_M", x);
    if g.grid_slope {
        dr.caveat("slope-on-grid");
    }
    Ok(vec![dr.finish(&s, tol)])
}

// ---------------------------------------------------------------- T3

/// The pair of records for the content substitution: one with the total
/// mass, one with a certified lower bound of the content in its place.
pub fn verify_t3_substitution(
    case: &VerificationCase,
    settings: &Settings,
) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let (r, big_r) = fixed(case)?;
    let tol = settings.tolerance;
    let k = case.resolution.unwrap_or(settings.resolution);
    let t = content_radius(case, r)?;
    check_support(&case.mu, r)?;
    let set = content_set(case)?;
    let m = case.mu.total_mass();
    let s = sides(&case.u, Some(&case.mu), r, big_r)?;
    let label_m = format!("{}/M", case.label);
    let label_c = format!("{}/content", case.label);
    let mut a = Draft::new(label_m, case.theorem, r, big_r);
    let mut b = Draft::new(label_c, case.theorem, r, big_r);
    match case.theorem {
        TheoremId::T3i => {
            let profile = ModulusProfile::new(&case.mu, r);
            let dini = profile.dini_upper(d).finite().ok_or_else(|| {
                Error::Domain(
                    "Dini condition fails: the modulus integral diverges at the origin".into(),
                )
            })?;
            // m_{h_μ} is bracketed by contents for tabulated gauges above and
            // below h_μ
            let upper_gauge = profile.dominating_gauge()?;
            let upper = content_upper(&set, &upper_gauge, t, k)?.upper;
            let lower_gauge = lower_gauge(&profile)?;
            let fl = frostman_lower(&set, &lower_gauge, k)?.lower;
            let sub = m.max(fl);
            a.factors = t1_factors(d, r, big_r, s.t_low, m, dini)?;
            b.factors = t1_factors(d, r, big_r, s.t_low, sub, dini)?;
            for dr in [&mut a, &mut b] {
                dr.detail("M", m);
                dr.detail("modulus_integral_upper", dini);
            }
            b.detail("content_upper", upper);
            b.detail("content_frostman_lower", fl);
            b.detail("content_used", sub);
            b.caveat("gauge-tabulated");
            if m > upper * (1.0 + tol) {
                b.assertions_ok = false;
                b.caveat("assertion-failed:M<=content");
            }
        }
        TheoremId::T3ii => {
            if d.get() != 2 {
                return Err(Error::Unsupported("contents are computed in the plane only".into()));
            }
            let g = gauge_setup(case, d, r, tol)?;
            let upper = content_upper(&set, &g.h, t, k)?.upper;
            let fl = frostman_lower(&set, &g.h, k)?.lower;
            let sub = m.max(fl);
            let (fa, xa) = t2_factors(d, r, big_r, s.t_low, m, &g.h, g.s_h)?;
            let (fb, xb) = t2_factors(d, r, big_r, s.t_low, sub, &g.h, g.s_h)?;
            a.factors = fa;
            b.factors = fb;
            a.detail("h_inverse_M", xa);
            b.detail("h_inverse_content", xb);
            for dr in [&mut a, &mut b] {
                dr.detail("M", m);
                dr.detail("s_h", g.s_h);
            }
            b.detail("content_upper", upper);
            b.detail("content_frostman_lower", fl);
            b.detail("content_used", sub);
            if m > upper * (1.0 + tol) {
                b.assertions_ok = false;
                b.caveat("assertion-failed:M<=content");
            }
            // substituting the larger content must not shrink the bound
            let rhs_m = factor_product(&a.factors);
            let capped = upper.min(g.h.eval(r)).max(m);
            let (fu, _) = t2_factors(d, r, big_r, s.t_low, capped, &g.h, g.s_h)?;
            let rhs_up = factor_product(&fu);
            b.detail("rhs_with_content_upper", rhs_up);
            if rhs_up < rhs_m * (1.0 - 1e-12) || factor_product(&b.factors) < rhs_m * (1.0 - 1e-12) {
                b.assertions_ok = false;
                b.caveat("assertion-failed:substitution-monotone");
            }
            let mono = lemma2_check(&g.h, d, r, E * r, LEMMA_POINTS)?;
            b.detail("monotone_worst_drop", mono.worst_drop);
            if !mono.monotone {
                b.assertions_ok = false;
                b.caveat("assertion-failed:substitution-monotone");
            }
            if g.grid_slope {
                a.caveat("slope-on-grid");
                b.caveat("slope-on-grid");
            }
        }
        other => return Err(Error::Parse(format!("{other} is not a substitution case"))),
    }
    Ok(vec![a.finish(&s, tol), b.finish(&s, tol)])
}

/// Tabulated gauge below `h_μ` on the profile grid: the node at `t_{i+1}`
/// carries the lower bound found at `t_i`.
fn lower_gauge(p: &ModulusProfile) -> Result<Gauge> {
    let n = p.ts.len();
    let mut nodes = Vec::with_capacity(n);
    let mut best: f64 = 0.0;
    for i in 0..n {
        best = best.max(p.lower[i.saturating_sub(1)]);
        nodes.push((p.ts[i], best.max(f64::MIN_POSITIVE)));
    }
    Gauge::tabulated(nodes)
}

// ---------------------------------------------------------------- T5

pub fn verify_t5(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let (r, big_r) = fixed(case)?;
    let tol = settings.tolerance;
    let (p, b) = match (case.p, case.b) {
        (Some(p), Some(b)) => (p, b),
        _ => return Err(Error::Parse("T5 needs p and b".into())),
    };
    let k = d.as_f64() - 2.0;
    if !(p > k && p <= d.as_f64()) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "need p in ({k}, {}] and b > 0, got p = {p}, b = {b}",
            d.get()
        )));
    }
    let t = content_radius(case, r)?;
    check_support(&case.mu, r)?;
    ModulusProfile::new(&case.mu, r).check_dominated(|x| b * x.powf(p), tol)?;
    let m = case.mu.total_mass();
    let cp = c_p(p)?;
    // M ≤ m_h^t(S) with h = (b / c_p) c_p x^p
    let from_mass = cp * m / b;
    let s = sides(&case.u, Some(&case.mu), r, big_r)?;
    let mut dr = Draft::new(case.label.clone(), case.theorem, r, big_r);
    let mut pm = from_mass;
    match content_set(case) {
        Ok(set) if d.get() == 2 => {
            let h = Gauge::hausdorff(p)?;
            let kk = case.resolution.unwrap_or(settings.resolution);
            let fl = frostman_lower(&set, &h, kk)?.lower;
            let up = content_upper(&set, &h, t, kk)?.upper;
            dr.detail("content_frostman_lower", fl);
            dr.detail("content_upper", up);
            if from_mass > up * (1.0 + tol) {
                dr.assertions_ok = false;
                dr.caveat("assertion-failed:mass<=content");
            }
            pm = pm.max(fl);
        }
        _ => dr.caveat("content-from-mass"),
    }
    dr.detail("M", m);
    dr.detail("content_from_mass", from_mass);
    dr.detail("content_used", pm);
    dr.factors = if d.get() == 2 {
        dr.caveat("prefactor-5b/p");
        vec![
            Factor::new("constant", 5.0 * b / p * (big_r + r) / (big_r - r)),
            Factor::new("T_U", s.t_low),
            Factor::new("p_content", pm),
            Factor::new("log_factor", log_or_inf(PI * (p + 1.0).exp() * r.powf(p), pm)),
        ]
    } else {
        let dd = d.as_f64();
        vec![
            Factor::new("constant", b * dd.powf(dd) * constant_a(d, r, big_r)?),
            Factor::new("T_U", s.t_low),
            Factor::new("p_content", pm),
            Factor::new("content_factor", 1.0 + 1.0 / ((p - k) * pm.powf(k / p))),
        ]
    };
    if d.get() == 2 {
        let stated = factor_product(&dr.factors) / 5.0;
        dr.detail("rhs_stated_constant", stated);
    }
    Ok(vec![dr.finish(&s, tol)])
}

// ---------------------------------------------------------------- corollaries

fn lebesgue_total(mu: &MeasureRep) -> Result<f64> {
    match mu {
        MeasureRep::GridLebesgue(g) if g.densities().iter().all(|&x| x == 1.0) => Ok(g.total()),
        _ => Err(Error::Domain("needs a unit-density grid (Lebesgue measure on a cell union)".into())),
    }
}

fn leb_factors(d: Dimension, r: f64, big_r: f64, t_low: f64, lam: f64, sweep_s: Option<f64>) -> Result<Vec<Factor>> {
    let dd = d.as_f64();
    Ok(if d.get() == 2 {
        let c = match sweep_s {
            None => 8.0 * (big_r + r) / (big_r - r),
            Some(s) => 8.0 * (1.0 + 2.0 * r / s),
        };
        vec![
            Factor::new("constant", c),
            Factor::new("T_U", t_low),
            Factor::new("lambda", lam),
            Factor::new("log_factor", log_or_inf(PI * E.powi(3) * r * r, lam)),
        ]
    } else {
        let c = match sweep_s {
            None => 6.0 * dd.powf(dd) * constant_a(d, r, big_r)?,
            Some(s) => {
                30.0 * dd.powf(dd + 1.0) * (1.0 + 2.0 * r / s).powf(dd - 1.0) * (1.0 + s).powf(dd - 2.0)
            }
        };
        vec![
            Factor::new("constant", c),
            Factor::new("T_U", t_low),
            Factor::new("lambda_term", lam + lam.powf(2.0 / dd)),
        ]
    })
}

pub fn verify_cor_leb(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let tol = settings.tolerance;
    lebesgue_total(&case.mu)?;
    match case.theorem {
        TheoremId::CorLeb => {
            let (r, big_r) = fixed(case)?;
            check_support(&case.mu, r)?;
            let lam = lebesgue_total(&case.mu)?;
            let s = sides(&case.u, Some(&case.mu), r, big_r)?;
            let mut dr = Draft::new(case.label.clone(), case.theorem, r, big_r);
            dr.factors = leb_factors(d, r, big_r, s.t_low, lam, None)?;
            Ok(vec![dr.finish(&s, tol)])
        }
        _ => {
            let sw = sweep(case)?;
            sw.radii
                .iter()
                .map(|&r| {
                    in_sweep(r, {
                        let (sr, big_r) = sweep_outer(sw, r)?;
                        let part = restrict_to_ball(&case.mu, r)?;
                        let lam = match &part.measure {
                            Some(m) => lebesgue_total(m)?,
                            None => 0.0,
                        };
                        let s = sides(&case.u, part.measure.as_ref(), r, big_r)?;
                        let mut dr = Draft::new(sweep_label(&case.label, r), case.theorem, r, big_r);
                        dr.factors = leb_factors(d, r, big_r, s.t_low, lam, Some(sr))?;
                        dr.detail("s", sr);
                        if !part.exact {
                            dr.caveat("inner-cells");
                        }
                        Ok(dr.finish(&s, tol))
                    })
                })
                .collect()
        }
    }
}

fn curve_length(mu: &MeasureRep) -> Result<f64> {
    match mu {
        MeasureRep::PolylineLength(p) if p.density() == 1.0 => Ok(p.length()),
        _ => Err(Error::Domain("needs the length measure (density 1) of a polyline".into())),
    }
}

pub fn verify_cor_curve(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    dims(case)?;
    let tol = settings.tolerance;
    curve_length(&case.mu)?;
    let log = |r: f64, sigma: f64| log_or_inf(PI * E * E * r, sigma);
    match case.theorem {
        TheoremId::CorCurve => {
            let (r, big_r) = fixed(case)?;
            check_support(&case.mu, r)?;
            let lc = lipschitz_constants(&case.mu)?;
            if !lc.bilipschitz {
                return Err(Error::Domain("the curve is not bilipschitz".into()));
            }
            let sigma = curve_length(&case.mu)?;
            let s = sides(&case.u, Some(&case.mu), r, big_r)?;
            let mut dr = Draft::new(case.label.clone(), case.theorem, r, big_r);
            dr.factors = vec![
                Factor::new("constant", 15.0 * lc.lip * lc.lip_inv * (big_r + r) / (big_r - r)),
                Factor::new("T_U", s.t_low),
                Factor::new("sigma", sigma),
                Factor::new("log_factor", log(r, sigma)),
            ];
            dr.detail("lip", lc.lip);
            dr.detail("lip_inv", lc.lip_inv);
            Ok(vec![dr.finish(&s, tol)])
        }
        _ => {
            let sw = sweep(case)?;
            graph_slope(&case.mu)?;
            sw.radii
                .iter()
                .map(|&r| {
                    in_sweep(r, {
                        let (sr, big_r) = sweep_outer(sw, r)?;
                        let part = restrict_to_ball(&case.mu, r)?;
                        let (sigma, q) = match &part.measure {
                            Some(m) => (curve_length(m)?, graph_slope(m)?),
                            None => (0.0, 0.0),
                        };
                        let s = sides(&case.u, part.measure.as_ref(), r, big_r)?;
                        let mut dr = Draft::new(sweep_label(&case.label, r), case.theorem, r, big_r);
                        dr.factors = vec![
                            Factor::new("constant", 15.0 * (1.0 + q * q).sqrt() * (1.0 + 2.0 * r / sr)),
                            Factor::new("T_U", s.t_low),
                            Factor::new("sigma", sigma),
                            Factor::new("log_factor", log(r, sigma)),
                        ];
                        dr.detail("s", sr);
                        dr.detail("slope", q);
                        Ok(dr.finish(&s, tol))
                    })
                })
                .collect()
        }
    }
}

/// Largest slope of a polyline that is the graph of a function of `x`.
fn graph_slope(mu: &MeasureRep) -> Result<f64> {
    let MeasureRep::PolylineLength(p) = mu else {
        return Err(Error::Domain("needs a polyline".into()));
    };
    let mut q: f64 = 0.0;
    for (a, b) in p.segments() {
        let dx = b[0] - a[0];
        if !(dx > 0.0) {
            return Err(Error::Domain("the curve is not a graph over increasing x".into()));
        }
        q = q.max(((b[1] - a[1]) / dx).abs());
    }
    Ok(q)
}

pub fn verify_cor_surf(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let (r, big_r) = fixed(case)?;
    let tol = settings.tolerance;
    let MeasureRep::TriangulatedArea(surf) = &case.mu else {
        return Err(Error::Domain("needs a triangulated surface measure".into()));
    };
    check_support(&case.mu, r)?;
    let lc = lipschitz_constants(&case.mu)?;
    if !lc.bilipschitz {
        return Err(Error::Domain("the surface is not bilipschitz".into()));
    }
    let sigma = surf.area();
    let dd = d.as_f64();
    let s = sides(&case.u, Some(&case.mu), r, big_r)?;
    let mut dr = Draft::new(case.label.clone(), case.theorem, r, big_r);
    dr.factors = vec![
        Factor::new(
            "constant",
            3.0 * dd.powf(2.0 * dd) * (lc.lip * lc.lip_inv).powf(dd - 1.0) * constant_a(d, r, big_r)?,
        ),
        Factor::new("T_U", s.t_low),
        Factor::new("sigma_term", sigma + sigma.powf(1.0 / (dd - 1.0))),
    ];
    dr.detail("lip", lc.lip);
    dr.detail("lip_inv", lc.lip_inv);
    dr.detail("sigma", sigma);
    Ok(vec![dr.finish(&s, tol)])
}

pub fn verify_diskball(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    let d = dims(case)?;
    let tol = settings.tolerance;
    let sw = sweep(case)?;
    if case.mu.support_radius() >= 1.0 {
        return Err(Error::Domain("the measure must be concentrated in the open unit ball".into()));
    }
    let dd = d.as_f64();
    sw.radii
        .iter()
        .map(|&r| {
            in_sweep(r, {
                let (sr, big_r) = sweep_outer(sw, r)?;
                if !(r < 1.0 && sr < 1.0 - r) {
                    return Err(Error::Domain(format!("need 0 < s(r) < 1 - r, got s(r) = {sr}")));
                }
                let part = restrict_to_ball(&case.mu, r)?;
                let (mrad, sup_n) = match &part.measure {
                    None => (0.0, 0.0),
                    Some(m) => {
                        let mut sup: f64 = 0.0;
                        for y in m.sample_points(SUP_CANDIDATES) {
                            match radial_counting_n(m, &y, r) {
                                ExtendedReal::Finite(v) => sup = sup.max(v),
                                _ => {
                                    return Err(Error::Domain(
                                        "the counting function of the restricted measure is infinite".into(),
                                    ))
                                }
                            }
                        }
                        (m.total_mass(), sup)
                    }
                };
                let s = sides(&case.u, part.measure.as_ref(), r, big_r)?;
                let mut dr = Draft::new(sweep_label(&case.label, r), case.theorem, r, big_r);
                let pre = if d.get() == 2 {
                    dr.caveat("prefactor-15");
                    15.0 / sr
                } else {
                    3f64.powf(2.0 * dd) / sr.powf(dd - 1.0)
                };
                dr.factors = vec![
                    Factor::new("prefactor", pre),
                    Factor::new("T_U", s.t_low),
                    Factor::new("mass_and_counting", mrad / r.powf(dd - 2.0) + sup_n),
                ];
                dr.detail("s", sr);
                dr.detail("mu_rad", mrad);
                dr.detail("sup_counting_lower", sup_n);
                dr.caveat("rhs-lower-bound");
                dr.caveat("sup-over-support");
                if !part.exact {
                    dr.caveat("inner-part");
                }
                Ok(dr.finish(&s, tol))
            })
        })
        .collect()
}

/// Dispatches on the theorem id.
pub fn verify_case(case: &VerificationCase, settings: &Settings) -> Result<Vec<VerificationRecord>> {
    match case.theorem {
        TheoremId::T1 => verify_t1(case, settings),
        TheoremId::T2C | TheoremId::T2D => verify_t2(case, settings),
        TheoremId::T3i | TheoremId::T3ii => verify_t3_substitution(case, settings),
        TheoremId::T5C | TheoremId::T5D => verify_t5(case, settings),
        TheoremId::CorLeb | TheoremId::CorLebSweep => verify_cor_leb(case, settings),
        TheoremId::CorCurve | TheoremId::CorCurveSweep => verify_cor_curve(case, settings),
        TheoremId::CorSurf => verify_cor_surf(case, settings),
        TheoremId::CorDiskBall => verify_diskball(case, settings),
    }
}
