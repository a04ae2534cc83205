use approx::assert_relative_eq;

use super::*;
use crate::error::Error;
use crate::geom;
use crate::constants::Dimension;

fn atoms2(list: &[([f64; 2], f64)]) -> MeasureRep {
    MeasureRep::Atomic(
        Atomic::new(
            Dimension::PLANE,
            list.iter().map(|(p, m)| ([p[0], p[1], 0.0], *m)).collect(),
        )
        .unwrap(),
    )
}

fn unit_segment() -> MeasureRep {
    MeasureRep::PolylineLength(Polyline::segment([0.0, 0.0], [1.0, 0.0]).unwrap())
}

#[test]
fn ball_mass_examples() {
    let a = atoms2(&[([0.0, 0.0], 1.0)]);
    assert_eq!(ball_mass(&a, &[0.0; 3], 0.0), 1.0);
    assert_relative_eq!(ball_mass(&unit_segment(), &[0.5, 0.0, 0.0], 0.25), 0.5, max_relative = 1e-14);
}

#[test]
fn grid_ball_mass_against_cell_counting() {
    let g = Grid::from_region(
        Dimension::PLANE,
        0.01,
        [0.0; 3],
        &Region::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        },
    )
    .unwrap();
    assert_eq!(g.cells().len(), 10_000);
    let mu = MeasureRep::GridLebesgue(g.clone());
    let c = [0.5, 0.5, 0.0];
    let v = ball_mass(&mu, &c, 0.1);
    // oracle: count cells by center membership
    let counted = g
        .cells()
        .iter()
        .filter(|k| geom::dist(&g.cell_center(k), &c) <= 0.1)
        .count() as f64
        * 1e-4;
    let exact = std::f64::consts::PI * 0.01;
    assert!((v - exact).abs() <= 0.02 * exact);
    assert!((counted - exact).abs() <= 0.02 * exact);
}

#[test]
fn grid_3d_bounds_enclose_ball_volume() {
    let g = Grid::from_region(
        Dimension::SPACE,
        0.05,
        [0.0; 3],
        &Region::Box {
            lo: vec![-1.0; 3],
            hi: vec![1.0; 3],
        },
    )
    .unwrap();
    let mu = MeasureRep::GridLebesgue(g);
    let b = mu.ball_mass_bounds(&[0.01, 0.02, 0.0], 0.3);
    let v = 4.0 / 3.0 * std::f64::consts::PI * 0.027;
    assert!(b.lower <= v && v <= b.upper, "{b:?} vs {v}");
    assert!(b.half_gap() < 0.005 * v, "{b:?}");
}

#[test]
fn two_atom_modulus() {
    let mu = atoms2(&[([0.0, 0.0], 1.0), ([2.0, 0.0], 1.0)]);
    let m = modulus_of_continuity(&mu, 0.9);
    assert_eq!((m.lower, m.upper, m.mode), (1.0, 1.0, ModulusMode::Exact));
    let m = modulus_of_continuity(&mu, 1.0);
    assert_eq!((m.lower, m.upper), (2.0, 2.0));
}

#[test]
fn atomic_modulus_against_brute_force() {
    // three atoms at the corners of a triangle; a ball of radius t catches all
    // three iff t ≥ circumradius
    let mu = atoms2(&[([0.0, 0.0], 1.0), ([1.0, 0.0], 2.0), ([0.3, 0.8], 4.0)]);
    for &t in &[0.2, 0.45, 0.5, 0.55, 0.6] {
        let m = modulus_of_continuity(&mu, t);
        // oracle: dense grid of centers gives a lower bound that approaches the sup
        let mut brute: f64 = 0.0;
        let n = 400;
        for i in 0..=n {
            for j in 0..=n {
                let c = [-0.5 + 2.0 * i as f64 / n as f64, -0.5 + 1.8 * j as f64 / n as f64, 0.0];
                brute = brute.max(ball_mass(&mu, &c, t));
            }
        }
        assert!(brute <= m.upper, "t={t}");
        let bb = modulus_with(&mu, t, &ModulusOptions::default());
        assert_eq!(bb.upper, m.upper);
    }
}

#[test]
fn segment_modulus_exact() {
    let m = modulus_of_continuity(&unit_segment(), 0.25);
    assert_eq!(m.mode, ModulusMode::Exact);
    assert_relative_eq!(m.upper, 0.5);
}

#[test]
fn bent_curve_modulus_is_certified() {
    let mu = MeasureRep::PolylineLength(
        Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false, 1.0).unwrap(),
    );
    let t = 0.25;
    let m = modulus_of_continuity(&mu, t);
    // oracle: brute-force center grid
    let mut brute: f64 = 0.0;
    for i in 0..=300 {
        for j in 0..=300 {
            let c = [0.5 + 0.7 * i as f64 / 300.0, -0.2 + 0.7 * j as f64 / 300.0, 0.0];
            brute = brute.max(ball_mass(&mu, &c, t));
        }
    }
    // the grid maximum is itself only a lower bound for the sup
    assert!(brute <= m.upper + 1e-12 && m.lower >= 0.99 * brute, "{m:?} {brute}");
    assert!((m.upper - m.lower) <= 0.0101 * m.upper);
    // corner ball: two legs of length t·√2 at best
    assert!(m.lower > 0.5 && m.lower <= 2.0 * 2f64.sqrt() * t);
}

#[test]
fn modulus_saturates_at_enclosing_radius() {
    let mu = atoms2(&[([0.0, 0.0], 1.0), ([0.3, 0.1], 0.5)]);
    let r = mu.support_radius();
    let m = modulus_of_continuity(&mu, r);
    assert_eq!((m.lower, m.upper), (1.5, 1.5));
}

#[test]
fn cantor_ball_mass_and_power_law() {
    let c = Cantor::interval(12);
    let mu = MeasureRep::CantorSelfSimilar(c.clone());
    assert_relative_eq!(ball_mass(&mu, &[0.5, 0.0, 0.0], 0.5), 1.0);
    assert_relative_eq!(ball_mass(&mu, &[0.0, 0.0, 0.0], 1.0 / 3.0), 0.5, max_relative = 1e-12);
    // interval [0, 1/9] carries 1/4
    assert_relative_eq!(ball_mass(&mu, &[1.0 / 18.0, 0.0, 0.0], 1.0 / 18.0), 0.25, max_relative = 1e-12);
    let pb = mu.small_scale_bound().unwrap();
    for t in quad::log_grid(1e-6, 1.0, 30) {
        assert!(modulus_of_continuity(&mu, t).upper <= pb.eval(t) * (1.0 + 1e-12));
    }
}

#[test]
fn cantor_dust_mass() {
    let c = Cantor::new(
        Dimension::PLANE,
        3,
        CantorBase::Square {
            lo: [0.0, 0.0],
            side: 1.0,
        },
        1.0,
    )
    .unwrap();
    let mu = MeasureRep::CantorSelfSimilar(c);
    // corner square [0,1/3]^2 carries 1/4, fully inside the ball
    assert_relative_eq!(ball_mass(&mu, &[0.0, 0.0, 0.0], 0.48), 0.25, max_relative = 1e-12);
    assert_relative_eq!(ball_mass(&mu, &[0.5, 0.5, 0.0], 1.0), 1.0);
}

#[test]
fn radial_counting_examples() {
    let y = [0.0; 3];
    let a = atoms2(&[([0.5, 0.0], 1.0)]);
    assert_relative_eq!(radial_counting_n(&a, &y, 1.0).to_f64(), 2f64.ln(), max_relative = 1e-15);
    let b = atoms2(&[([0.0, 0.0], 1.0)]);
    assert_eq!(radial_counting_n(&b, &y, 1.0), ExtendedReal::PosInf);
    let c = MeasureRep::Atomic(Atomic::new(Dimension::SPACE, vec![([1.0, 0.0, 0.0], 2.0)]).unwrap());
    assert_eq!(radial_counting_n(&c, &y, 1.0).to_f64(), 0.0);
    assert_relative_eq!(radial_counting_n(&c, &y, 2.0).to_f64(), 2.0, max_relative = 1e-15);
}

/// Oracle: piecewise integration of the step function `μ_y(t)/t^{d-1}` between
/// consecutive atom distances.
fn step_oracle(mu: &Atomic, y: &geom::Point, x: f64) -> f64 {
    let d = mu.dim;
    let mut ds: Vec<f64> = mu.atoms.iter().map(|(p, _)| geom::dist(p, y)).filter(|&r| r <= x).collect();
    ds.push(x);
    ds.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    for w in ds.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let m = mu.ball_mass(y, 0.5 * (w[0] + w[1]));
        let r = quad::integrate(
            &|t: f64| m / t.powi(d.get() as i32 - 1),
            w[0],
            w[1],
            0.0,
            1e-13,
            200,
        );
        sum += r.value;
    }
    d.hat_d() as f64 * sum
}

#[test]
fn radial_counting_matches_oracle() {
    for d in [2, 3] {
        let dim = Dimension::new(d).unwrap();
        let z = if d == 3 { 0.2 } else { 0.0 };
        let a = Atomic::new(
            dim,
            vec![([0.3, 0.1, z], 1.5), ([-0.7, 0.4, 0.0], 0.25), ([1.2, -0.9, z], 2.0)],
        )
        .unwrap();
        let y = [0.05, -0.02, 0.0];
        for x in [0.2, 0.5, 1.0, 3.0] {
            let closed = radial_counting_n(&MeasureRep::Atomic(a.clone()), &y, x).to_f64();
            let oracle = step_oracle(&a, &y, x);
            assert_relative_eq!(closed, oracle, max_relative = 1e-8, epsilon = 1e-14);
        }
    }
}

#[test]
fn radial_counting_segment_closed_form() {
    // N_0(x) for unit-density segment [a, b] on the positive axis with x ≥ b:
    // ∫₀^x μ(B(t))/t dt = ∫ ln(x/s) ds over [a, b]
    let mu = MeasureRep::PolylineLength(Polyline::segment([0.5, 0.0], [1.5, 0.0]).unwrap());
    let x = 2.0f64;
    let f = |s: f64| s * (x.ln() - s.ln() + 1.0);
    let exact = f(1.5) - f(0.5);
    assert_relative_eq!(radial_counting_n(&mu, &[0.0; 3], x).to_f64(), exact, max_relative = 1e-8);
}

#[test]
fn graph_curve_examples() {
    let g = curve_measure_from_graph(&[0.0, 1.0], &[0.0, 0.0], 0.0).unwrap();
    assert_eq!((g.lip, g.lip_inv), (1.0, 1.0));
    assert_relative_eq!(g.curve.length(), 1.0);
    let g = curve_measure_from_graph(&[0.0, 1.0], &[0.0, 1.0], 1.0).unwrap();
    assert_relative_eq!(g.lip, 2f64.sqrt());
    assert_relative_eq!(g.curve.length(), 2f64.sqrt());
    let xs: Vec<f64> = (0..=8).map(|k| k as f64 / 8.0).collect();
    let ys: Vec<f64> = (0..=8).map(|k| if k % 2 == 0 { 0.0 } else { 0.125 }).collect();
    let g = curve_measure_from_graph(&xs, &ys, 1.0).unwrap();
    // oracle: per-segment lengths
    let sum: f64 = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| ((x[1] - x[0]).powi(2) + (y[1] - y[0]).powi(2)).sqrt())
        .sum();
    assert_relative_eq!(g.curve.length(), sum);
    assert_relative_eq!(sum, 2f64.sqrt(), max_relative = 1e-14);
    assert!(g.lip_inv <= 1.0);
    let err = curve_measure_from_graph(&[0.0, 1.0], &[0.0, 2.0], 1.0).unwrap_err();
    assert!(matches!(err, Error::SlopeViolation { index: 0, .. }));
}

#[test]
fn lipschitz_segment_and_arc() {
    let lc = Polyline::segment([0.0, 0.0], [1.0, 0.0]).unwrap().lipschitz_constants();
    assert_eq!((lc.lip, lc.lip_inv), (1.0, 1.0));
    let n = 256;
    let arc: Vec<[f64; 2]> = (0..=n)
        .map(|k| {
            let a = std::f64::consts::FRAC_PI_2 * k as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    let pl = Polyline::new(arc, false, 1.0).unwrap();
    let lc = pl.lipschitz_constants();
    // oracle: brute force over vertex pairs
    let v = pl.vertices();
    let mut brute: f64 = 1.0;
    let mut s = vec![0.0];
    for w in v.windows(2) {
        s.push(s.last().unwrap() + ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt());
    }
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let c = ((v[j][0] - v[i][0]).powi(2) + (v[j][1] - v[i][1]).powi(2)).sqrt();
            brute = brute.max((s[j] - s[i]) / c);
        }
    }
    assert!(lc.lip_inv >= brute * (1.0 - 1e-12));
    assert_relative_eq!(lc.lip_inv, brute, max_relative = 1e-9);
    let ideal = std::f64::consts::FRAC_PI_4 / (0.5f64).sqrt();
    assert_relative_eq!(lc.lip_inv, ideal, max_relative = 1e-4);
}

#[test]
fn lipschitz_right_angle() {
    let pl = Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false, 1.0).unwrap();
    assert_relative_eq!(pl.lipschitz_constants().lip_inv, 2f64.sqrt(), max_relative = 1e-12);
}

#[test]
fn self_intersection_rejected() {
    let err = Polyline::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], false, 1.0).unwrap_err();
    assert!(matches!(err, Error::SelfIntersection { first: 0, second: 2 }));
    assert!(Polyline::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]], false, 1.0).is_err());
}

#[test]
fn surfaces() {
    let sq = Surface::new(
        vec![
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]],
            [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
        ],
        None,
    )
    .unwrap();
    assert_relative_eq!(surface_measure_total(&sq), 1.0);
    let tri = Surface::new(vec![[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]], None).unwrap();
    assert_relative_eq!(surface_measure_total(&tri), 0.5);
    let lc = tri.lipschitz_constants().unwrap();
    assert_relative_eq!(lc.lip, 1.0);
    assert_relative_eq!(lc.lip_inv, 1.0);
    // oracle: refinement of the z = x patch keeps area √2
    for n in [1, 4, 16] {
        assert_relative_eq!(Surface::tilted_square(n, 1.0).area(), 2f64.sqrt(), max_relative = 1e-13);
    }
    let lc = Surface::tilted_square(2, 1.0).lipschitz_constants().unwrap();
    assert_relative_eq!(lc.lip, 2f64.sqrt(), max_relative = 1e-12);
    assert_relative_eq!(lc.lip_inv, 1.0, max_relative = 1e-12);
    assert!(Surface::new(vec![[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]], None).is_err());
}

#[test]
fn serde_round_trip() {
    let json = r#"{"kind":"grid_lebesgue","cell":0.25,"region":{"shape":"box","lo":[0,0],"hi":[1,1]}}"#;
    let mu: MeasureRep = serde_json::from_str(json).unwrap();
    assert_relative_eq!(mu.total_mass(), 1.0);
    let back: MeasureRep = serde_json::from_str(&serde_json::to_string(&mu).unwrap()).unwrap();
    assert_eq!(back, mu);
    let json = r#"{"kind":"atomic","atoms":[{"at":[1,2],"mass":3}]}"#;
    let mu: MeasureRep = serde_json::from_str(json).unwrap();
    assert_eq!(mu.total_mass(), 3.0);
    let bad = r#"{"kind":"atomic","atoms":[{"at":[1,2],"mass":-3}]}"#;
    assert!(serde_json::from_str::<MeasureRep>(bad).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn atomic_strategy() -> impl Strategy<Value = MeasureRep> {
        prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0), 0.1f64..2.0), 1..12).prop_map(|v| {
            MeasureRep::Atomic(
                Atomic::new(Dimension::PLANE, v.into_iter().map(|((x, y), m)| ([x, y, 0.0], m)).collect())
                    .unwrap(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn modulus_laws_on_atoms(mu in atomic_strategy(), ts in prop::collection::vec(0.0f64..3.0, 1..8)) {
            let total = mu.total_mass();
            let prof = modulus_profile(&mu, &ts);
            for (i, a) in prof.iter().enumerate() {
                prop_assert!(a.upper <= total * (1.0 + 1e-15));
                for b in &prof[i + 1..] {
                    if a.t <= b.t {
                        prop_assert!(a.upper <= b.upper + 1e-12);
                    }
                }
            }
            let r = mu.support_radius();
            let m = modulus_of_continuity(&mu, r);
            prop_assert_eq!(m.lower, total);
            prop_assert_eq!(m.upper, total);
        }

        #[test]
        fn curve_modulus_linear_bound(seed in prop::collection::vec(-0.3f64..0.3, 3..10), t in 0.001f64..1.0) {
            let n = seed.len();
            let xs: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
            let mut ys = vec![0.0; n];
            for k in 1..n { ys[k] = ys[k - 1] + seed[k] / (n - 1) as f64; }
            let g = curve_measure_from_graph(&xs, &ys, 0.3).unwrap();
            let lc = g.curve.lipschitz_constants();
            let mu = MeasureRep::PolylineLength(g.curve);
            let m = modulus_of_continuity(&mu, t);
            prop_assert!(m.lower <= m.upper);
            prop_assert!(m.upper <= 2.0 * 2f64.sqrt() * lc.lip * lc.lip_inv * t + 1e-12);
        }

        #[test]
        fn ball_mass_monotone_in_radius(x in -1.0f64..2.0, y in -1.0f64..1.0, t1 in 0.0f64..1.0, dt in 0.0f64..1.0) {
            let mu = MeasureRep::PolylineLength(
                Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], false, 1.0).unwrap(),
            );
            let c = [x, y, 0.0];
            prop_assert!(ball_mass(&mu, &c, t1) <= ball_mass(&mu, &c, t1 + dt) + 1e-12);
        }
    }
}
