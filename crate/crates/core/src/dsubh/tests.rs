use std::f64::consts::{E, LN_2};

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::measures::{Atomic, Cantor, Grid, MeasureRep, Polyline, Region, Surface};

fn log_z() -> DeltaSubharmonic {
    DeltaSubharmonic::rational(&[[0.0, 0.0]], &[], 1.0).unwrap()
}

fn shifted(a: f64) -> DeltaSubharmonic {
    DeltaSubharmonic::rational(&[[a, 0.0]], &[], 1.0).unwrap()
}

#[test]
fn evaluation_examples() {
    assert_relative_eq!(log_z().evaluate(&[E, 0.0]).to_f64(), 1.0, max_relative = 1e-15);
    assert_eq!(log_z().evaluate(&[0.0, 0.0]), ExtendedReal::NegInf);
    let u = DeltaSubharmonic::point_charge(Dimension::SPACE, vec![0.0; 3], 1.0).unwrap();
    assert_relative_eq!(u.evaluate(&[0.0, 2.0, 0.0]).to_f64(), -0.5);
    let pole = DeltaSubharmonic::rational(&[], &[[0.0, 0.0]], 1.0).unwrap();
    assert_eq!(pole.evaluate(&[0.0, 0.0]), ExtendedReal::PosInf);
    // a zero and a pole at one point cancel
    let both = DeltaSubharmonic::rational(&[[0.0, 0.0]], &[[0.0, 0.0]], 2.0).unwrap();
    assert_relative_eq!(both.evaluate(&[0.0, 0.0]).to_f64(), 2f64.ln());
}

#[test]
fn sphere_mean_examples() {
    assert_relative_eq!(log_z().sphere_mean_plus(2.0).unwrap().value, LN_2, max_relative = 1e-9);
    assert_eq!(log_z().sphere_mean_plus(0.5).unwrap().value, 0.0);
    let m = shifted(3.0).sphere_mean_plus(1.0).unwrap();
    assert!(m.value > LN_2 && m.value < 4f64.ln());
    // |z - 3| ≥ 2 on the unit circle, so U⁺ = U and the mean is ln 3
    assert_relative_eq!(m.value, 3f64.ln(), max_relative = 1e-6);
}

#[test]
fn sphere_mean_plus_against_fine_trapezoid() {
    // charge inside the circle: U⁺ has kinks, compare with 10⁶ nodes
    let u = DeltaSubharmonic::rational(&[[0.3, 0.1], [-0.5, 0.2]], &[[0.2, -0.6]], 1.7).unwrap();
    let n = 1_000_000;
    let oracle: f64 = (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
            u.plus(&[th.cos(), th.sin()])
        })
        .sum::<f64>()
        / n as f64;
    let m = u.sphere_mean_plus(1.0).unwrap();
    assert!(m.converged);
    assert_relative_eq!(m.value, oracle, max_relative = 1e-5);
}

#[test]
fn mean_value_calibration() {
    for (a, r) in [(0.3, 1.0), (1.2, 2.0), (0.0, 0.7)] {
        let m = shifted(a).sphere_mean(r).unwrap();
        assert_relative_eq!(m.value, r.ln(), epsilon = 1e-9);
    }
    // space: the mean of -1/|x - a| over |x| = R > |a| is -1/R
    let u = DeltaSubharmonic::point_charge(Dimension::SPACE, vec![0.2, -0.1, 0.3], 1.0).unwrap();
    let m = u.sphere_mean(1.5).unwrap();
    assert_relative_eq!(m.value, -1.0 / 1.5, max_relative = 1e-6);
}

#[test]
fn empirical_order_at_least_two() {
    let u = DeltaSubharmonic::rational(&[[0.3, 0.1]], &[[0.5, -0.2]], 1.0).unwrap();
    let m = u.sphere_mean_plus(1.0).unwrap();
    let h = &m.history;
    assert!(h.len() >= 5);
    // U crosses zero on the circle, so U⁺ has kinks; the order is taken over
    // three doublings to smooth out the oscillation of single steps
    let exact = h.last().unwrap().1;
    let order = ((h[0].1 - exact).abs() / (h[3].1 - exact).abs()).log2() / 3.0;
    assert!(order >= 2.0, "{order}");
}

#[test]
fn refuses_charges_near_sphere() {
    let u = shifted(1.0005);
    match u.sphere_mean_plus(1.0) {
        Err(Error::ChargeTooClose { distance, .. }) => assert!((distance - 5e-4).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn characteristic_examples() {
    let z2 = DeltaSubharmonic::rational(&[[0.0, 0.0], [0.0, 0.0]], &[], 1.0).unwrap();
    assert_relative_eq!(nevanlinna_t(&z2, 1.0, 2.0).unwrap().value, 2.0 * LN_2, max_relative = 1e-9);
    let inv = DeltaSubharmonic::rational(&[], &[[0.0, 0.0]], 1.0).unwrap();
    let t = nevanlinna_t(&inv, 0.5, 1.0).unwrap();
    assert!(t.mean_term.abs() < 1e-14);
    assert_relative_eq!(t.counting_term, LN_2, max_relative = 1e-15);
    let neg = DeltaSubharmonic::new(Dimension::PLANE, vec![], vec![], -1.0).unwrap();
    assert_eq!(nevanlinna_t(&neg, 0.0, 3.0).unwrap().value, 0.0);
    assert!(nevanlinna_t(&inv, 1.0, 0.5).is_err());
}

#[test]
fn counting_matches_measure_layer() {
    // same integral through the generic radial counting function
    let u = DeltaSubharmonic::new(
        Dimension::SPACE,
        vec![],
        vec![
            Charge { at: vec![0.3, 0.0, 0.1], mass: 2.0 },
            Charge { at: vec![0.0, -0.8, 0.2], mass: 0.5 },
        ],
        0.0,
    )
    .unwrap();
    let atoms = u
        .negative()
        .iter()
        .map(|c| ([c.at[0], c.at[1], c.at[2]], c.mass))
        .collect();
    let mu = MeasureRep::Atomic(Atomic::new(Dimension::SPACE, atoms).unwrap());
    let n = |x: f64| crate::measures::radial_counting_n(&mu, &[0.0; 3], x).to_f64();
    assert_relative_eq!(u.counting_between(0.5, 2.0), n(2.0) - n(0.5), max_relative = 1e-12);
}

#[test]
fn characteristic_grows_with_radius() {
    let u = DeltaSubharmonic::rational(&[[0.4, 0.4], [-1.5, 0.3]], &[[0.1, -0.6], [2.2, 1.0]], 0.5).unwrap();
    let mut last = 0.0;
    for big_r in [0.9, 1.2, 1.8, 2.5, 3.0, 4.0] {
        let t = nevanlinna_t(&u, 0.2, big_r).unwrap();
        assert!(t.value >= last - 1e-6, "R={big_r}: {} < {last}", t.value);
        last = t.value;
    }
    let u3 = DeltaSubharmonic::new(
        Dimension::SPACE,
        vec![Charge { at: vec![0.2, 0.0, 0.0], mass: 1.0 }],
        vec![Charge { at: vec![0.0, 0.5, 0.1], mass: 1.0 }],
        0.3,
    )
    .unwrap();
    let a = nevanlinna_t(&u3, 0.1, 1.0).unwrap().value;
    let b = nevanlinna_t(&u3, 0.1, 2.0).unwrap().value;
    assert!(b >= a - 1e-6);
}

#[test]
fn monte_carlo_in_four_dimensions() {
    let u = DeltaSubharmonic::point_charge(Dimension::new(4).unwrap(), vec![0.0; 4], 1.0).unwrap();
    let c = DeltaSubharmonic::new(u.dim(), u.positive().to_vec(), vec![], 2.0).unwrap();
    // -1/R² + 2 is constant on the sphere
    let m = c.sphere_mean_plus(1.0).unwrap();
    assert!(m.stochastic);
    assert_relative_eq!(m.value, 1.0, max_relative = 1e-12);
}

#[test]
fn integral_examples() {
    let atom = MeasureRep::Atomic(Atomic::new(Dimension::PLANE, vec![([E, 0.0, 0.0], 1.0)]).unwrap());
    assert_relative_eq!(integrate_plus_against(&log_z(), &atom).unwrap().value.to_f64(), 1.0, max_relative = 1e-15);
    let seg = MeasureRep::PolylineLength(Polyline::segment([1.0, 0.0], [2.0, 0.0]).unwrap());
    let r = integrate_plus_against(&log_z(), &seg).unwrap();
    assert_relative_eq!(r.value.to_f64(), 2.0 * 2f64.ln() - 1.0, max_relative = 1e-8);
    let seg = MeasureRep::PolylineLength(Polyline::segment([1.0 / E, 0.0], [E, 0.0]).unwrap());
    let r = integrate_plus_against(&log_z(), &seg).unwrap();
    assert_relative_eq!(r.value.to_f64(), 1.0, max_relative = 1e-6);
}

#[test]
fn atomic_is_plain_summation() {
    let u = DeltaSubharmonic::rational(&[[0.1, 0.2]], &[[-0.4, 0.0]], 2.0).unwrap();
    let atoms: Vec<_> = (0..50).map(|i| ([i as f64 * 0.07, 0.3, 0.0], 0.01 * (i + 1) as f64)).collect();
    let mu = MeasureRep::Atomic(Atomic::new(Dimension::PLANE, atoms.clone()).unwrap());
    let mut sum = 0.0;
    for (p, m) in &atoms {
        sum += m * u.plus(&p[..2]);
    }
    assert_eq!(integrate_plus_against(&u, &mu).unwrap().value.to_f64().to_bits(), sum.to_bits());
    let at_pole = MeasureRep::Atomic(Atomic::new(Dimension::PLANE, vec![([-0.4, 0.0, 0.0], 1.0)]).unwrap());
    let r = integrate_plus_against(&u, &at_pole).unwrap();
    assert!(r.hits_pole && r.value == ExtendedReal::PosInf);
}

#[test]
fn grid_matches_analytic_integral() {
    // ∫ over [1,2]² of ln|z|⁺ = ∫∫ ½ ln(x² + y²) dx dy
    let g = Grid::from_region(
        Dimension::PLANE,
        0.125,
        [1.0, 1.0, 0.0],
        &Region::Box { lo: vec![1.0, 1.0], hi: vec![2.0, 2.0] },
    )
    .unwrap();
    let r = integrate_plus_against(&log_z(), &MeasureRep::GridLebesgue(g)).unwrap();
    let f = |x: f64, y: f64| 0.5 * (x * x + y * y).ln();
    let oracle = crate::quad::integrate(
        |x| crate::quad::integrate(|y| f(x, y), 1.0, 2.0, 1e-14, 1e-13, 200).value,
        1.0,
        2.0,
        1e-14,
        1e-13,
        200,
    )
    .value;
    assert_relative_eq!(r.value.to_f64(), oracle, max_relative = 1e-4);
}

#[test]
fn surface_matches_grid_on_flat_square() {
    let u = DeltaSubharmonic::new(
        Dimension::SPACE,
        vec![],
        vec![Charge { at: vec![0.5, 0.5, 0.3], mass: 1.0 }],
        0.0,
    )
    .unwrap();
    let s = Surface::tilted_square(4, 0.0);
    let r = integrate_plus_against(&u, &MeasureRep::TriangulatedArea(s)).unwrap();
    // U = 1/|x - b| on the plane z = 0; 2D oracle on the unit square
    let f = |x: f64, y: f64| 1.0 / ((x - 0.5).powi(2) + (y - 0.5).powi(2) + 0.09).sqrt();
    let oracle = crate::quad::integrate(
        |x| crate::quad::integrate(|y| f(x, y), 0.0, 1.0, 1e-14, 1e-12, 400).value,
        0.0,
        1.0,
        1e-14,
        1e-12,
        400,
    )
    .value;
    assert_relative_eq!(r.value.to_f64(), oracle, max_relative = 1e-4);
}

#[test]
fn cantor_error_bound_covers_fine_sum() {
    let u = DeltaSubharmonic::rational(&[], &[[0.5, 0.4]], 1.0).unwrap();
    let c = Cantor::interval(12);
    let r = integrate_plus_against(&u, &MeasureRep::CantorSelfSimilar(c.clone())).unwrap();
    // level-12 midpoint sum as oracle
    let pieces = c.pieces(12);
    let m = 1.0 / pieces.len() as f64;
    let fine: f64 = pieces.iter().map(|(lo, s)| m * u.plus(&[lo[0] + s / 2.0, lo[1]])).sum();
    assert!((r.value.to_f64() - fine).abs() <= r.error + 1e-12);
    assert!(r.error <= 1e-4 * r.value.to_f64().abs() + 1e-12);
}

#[test]
fn spec_round_trip() {
    let js = r#"{"form":"rational","zeros":[[0,0],[1,0]],"poles":[[0,2]],"leading":-3}"#;
    let u: DeltaSubharmonic = serde_json::from_str(js).unwrap();
    assert_eq!(u.positive().len(), 2);
    assert_relative_eq!(u.constant(), 3f64.ln());
    let back: DeltaSubharmonic = serde_json::from_str(&serde_json::to_string(&u).unwrap()).unwrap();
    assert_eq!(back, u);
    let bad = r#"{"form":"charges","dim":3,"positive":[{"at":[0,0],"mass":1}]}"#;
    assert!(serde_json::from_str::<DeltaSubharmonic>(bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn harmonic_mean_is_log_radius(x in -0.9..0.9f64, y in -0.9..0.9f64, r in 1.0..3.0f64) {
        prop_assume!((x * x + y * y).sqrt() < 0.95);
        let u = DeltaSubharmonic::rational(&[[x, y]], &[], 1.0).unwrap();
        let m = u.sphere_mean(r).unwrap();
        prop_assert!((m.value - r.ln()).abs() < 1e-8);
    }

    #[test]
    fn plus_mean_dominates_mean(x in -2.0..2.0f64, y in -2.0..2.0f64, c in -1.0..1.0f64) {
        let u = DeltaSubharmonic::new(
            Dimension::PLANE,
            vec![Charge { at: vec![x, y], mass: 1.0 }],
            vec![Charge { at: vec![y, x + 0.1], mass: 0.5 }],
            c,
        ).unwrap();
        prop_assume!(u.check_sphere(1.0).is_ok());
        let plus = u.sphere_mean_plus(1.0).unwrap().value;
        let full = u.sphere_mean(1.0).unwrap().value;
        prop_assert!(plus >= full - 1e-9 && plus >= 0.0);
    }
}
