use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::measures::modulus_of_continuity;

fn seg() -> CompactSet {
    CompactSet::Segment { a: [0.0, 0.0], b: [1.0, 0.0] }
}

fn disk() -> CompactSet {
    CompactSet::Disk { center: [0.0, 0.0], radius: 1.0 }
}

fn square() -> CompactSet {
    CompactSet::Square { lo: [0.0, 0.0], side: 1.0 }
}

fn cantor(level: u32) -> CompactSet {
    CompactSet::Cantor { level, start: [0.0, 0.0], length: 1.0 }
}

fn hp(p: f64) -> Gauge {
    Gauge::power(c_p(p).unwrap(), p).unwrap()
}

#[test]
fn unbounded_radius_examples() {
    let e = content_upper(&seg(), &hp(1.0), f64::INFINITY, 8).unwrap();
    assert_relative_eq!(e.upper, 1.0, max_relative = 1e-9);
    let e = content_upper(&disk(), &hp(2.0), f64::INFINITY, 8).unwrap();
    assert_relative_eq!(e.upper, PI, max_relative = 1e-9);
    let e = content_upper(&square(), &hp(2.0), f64::INFINITY, 8).unwrap();
    assert!(e.upper <= PI / 2.0 * (1.0 + 1e-9));
}

#[test]
fn cantor_triadic_cost() {
    let p = 2f64.ln() / 3f64.ln();
    let oracle = c_p(p).unwrap() * 2f64.powf(-p);
    assert!((oracle - 1.035).abs() < 1e-3);
    let e = p_content(&cantor(12), p, f64::INFINITY, 10).unwrap();
    assert!(e.upper <= oracle * (1.0 + 1e-9), "{}", e.upper);
    assert!(e.lower > 0.0 && e.lower <= e.upper);
}

#[test]
fn points_have_zero_lower_bound() {
    let s = CompactSet::Point { at: [0.3, 0.4] };
    let e = p_content(&s, 1.0, f64::INFINITY, 6).unwrap();
    assert_eq!(e.lower, 0.0);
    assert!(e.upper < 1e-100);
    let f = frostman_lower(&s, &hp(0.5), 6).unwrap();
    assert_eq!(f.lower, 0.0);
}

#[test]
fn sandwich_and_feasibility() {
    let arc = CompactSet::Arc { center: [0.0, 0.0], radius: 1.0, start: 0.0, end: PI / 2.0 };
    let p_c = 2f64.ln() / 3f64.ln();
    for (s, ps) in [
        (seg(), vec![p_c, 1.0, 2.0]),
        (disk(), vec![1.0, 2.0]),
        (square(), vec![1.0, 2.0]),
        (arc, vec![1.0, 2.0]),
        (cantor(12), vec![p_c, 1.0]),
    ] {
        let raster = Raster::new(&s, 7).unwrap();
        for p in ps {
            let h = hp(p);
            for t in [f64::INFINITY, 0.3, 0.05] {
                let c = best_cover(&s, &raster, &h, t).unwrap();
                assert!(cover_is_feasible(&s, &raster, &c, t), "{s:?} p={p} t={t} {}", c.method);
                let f = frostman(&s, &raster, &h);
                assert!(f.lower <= c.cost * (1.0 + 1e-12), "{s:?} p={p} t={t}: {} > {}", f.lower, c.cost);
            }
        }
    }
}

#[test]
fn segment_frostman_constant() {
    let f = frostman_lower(&seg(), &hp(1.0), 10).unwrap();
    assert!(f.constant.is_finite() && f.constant >= 1.0);
    assert!(f.lower <= 1.0 && f.lower >= 1.0 / f.constant * 0.99);
    assert!(f.lower > 0.2, "{}", f.lower);
}

#[test]
fn square_sandwich() {
    let e = p_content(&square(), 2.0, f64::INFINITY, 8).unwrap();
    assert!(e.lower > 0.0 && e.lower <= 1.0 && 1.0 <= e.upper);
}

#[test]
fn frostman_modulus_on_grid() {
    for (s, p) in [(seg(), 1.0), (disk(), 2.0), (cantor(8), 2f64.ln() / 3f64.ln())] {
        let k = 5;
        let raster = Raster::new(&s, k).unwrap();
        let h = hp(p);
        let f = frostman(&s, &raster, &h);
        assert!(f.atomic_constant.is_finite());
        let mut t = f.atom_scale;
        while t < 4.0 {
            let m = modulus_of_continuity(&f.measure, t);
            let cap = f.atomic_constant * h.eval(t);
            assert!(m.lower <= cap * (1.0 + 1e-9), "{s:?} t={t}: {} > {cap}", m.lower);
            t *= 1.7;
        }
    }
}

#[test]
fn monotone_in_radius() {
    let r = content_monotonicity_check(&seg(), &hp(1.0), &[f64::INFINITY, 1.0, 0.1], 8).unwrap();
    assert!(r.raw_monotone, "{:?}", r.raw);
    let r = content_monotonicity_check(&disk(), &hp(2.0), &[f64::INFINITY, 0.5], 8).unwrap();
    assert!(r.raw[1] >= r.raw[0]);
    let pt = CompactSet::Point { at: [0.0, 0.0] };
    let r = content_monotonicity_check(&pt, &hp(1.0), &[f64::INFINITY, 0.5, 0.01], 6).unwrap();
    assert!(r.raw.iter().all(|v| *v < 1e-100));
    let prof = content_upper_profile(&disk(), &hp(2.0), &[0.05, 0.5, f64::INFINITY], 7).unwrap();
    assert!(prof.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn super_dimensional_content_vanishes() {
    let mut last = f64::INFINITY;
    for k in [4, 6, 8] {
        let e = p_content(&seg(), 1.5, 1.0, k).unwrap();
        assert!(e.upper < last);
        last = e.upper;
    }
}

#[test]
fn modulus_gauge_single_ball() {
    // two half atoms at distance 1: any ball of radius ≥ 1/2 holds both
    let nodes = vec![(0.1, 0.5), (0.49999, 0.5 + 1e-9), (0.5, 1.0), (2.0, 1.0 + 1e-9)];
    let h = Gauge::tabulated(nodes).unwrap();
    let s = CompactSet::Points { at: vec![[0.0, 0.0], [1.0, 0.0]] };
    let e = content_upper(&s, &h, 1.0, 6).unwrap();
    assert_relative_eq!(e.upper, 1.0, max_relative = 1e-2);
}

#[test]
fn rejects_bad_radius() {
    assert!(content_upper(&seg(), &hp(1.0), 0.0, 6).is_err());
    assert!(content_upper(&CompactSet::Points { at: vec![] }, &hp(1.0), 1.0, 6).is_err());
}

#[test]
fn estimate_round_trip() {
    let e = p_content(&seg(), 1.0, f64::INFINITY, 5).unwrap();
    let js = serde_json::to_string(&e).unwrap();
    let back: ContentEstimate = serde_json::from_str(&js).unwrap();
    assert_eq!(back.upper, e.upper);
    assert!(back.t.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn random_segments_sandwich(x in -2.0..2.0f64, y in -2.0..2.0f64, dx in 0.05..1.5f64, dy in -1.5..1.5f64, t in 0.02..3.0f64) {
        let s = CompactSet::Segment { a: [x, y], b: [x + dx, y + dy] };
        let raster = Raster::new(&s, 6).unwrap();
        let h = hp(1.0);
        let c = best_cover(&s, &raster, &h, t).unwrap();
        prop_assert!(cover_is_feasible(&s, &raster, &c, t));
        let len = (dx * dx + dy * dy).sqrt();
        // no cover of a segment can be cheaper than its length
        prop_assert!(c.cost >= len * (1.0 - 1e-9));
        let f = frostman(&s, &raster, &h);
        prop_assert!(f.lower <= len * (1.0 + 1e-9));
    }
}
