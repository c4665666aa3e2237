use std::f64::consts::PI;

use proptest::prelude::*;

use scurve_core::cubic;
use scurve_core::poly::{CplxPoly, RealPoly};
use scurve_core::potential::{ContourClass, Potential, SectorLabel};
use scurve_core::quaddiff::{emanation_angles, wrap_angle, QuadraticDifferential, TrajectoryKind, Zero};
use scurve_core::quadrature::EndpointGrading;
use scurve_core::resultant::{relative_resultant, sylvester_resultant};
use scurve_core::roots::{poly_roots, real_root_in_interval, RootOptions};
use scurve_core::C64;

fn separated_roots(max: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=max)
        .prop_map(|v| v.into_iter().map(|(x, y)| C64::new(x, y)).collect::<Vec<_>>())
        .prop_filter("well separated", |r| {
            r.iter()
                .enumerate()
                .all(|(i, a)| r[i + 1..].iter().all(|b| (a - b).norm() > 0.2))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubic_parameter_system_holds(k in -3.0f64..3.0) {
        let p = cubic::params_from_k(k).unwrap();
        prop_assert!(p.b > 0.0);
        prop_assert!((p.a - 2.0 / (p.b * p.b)).abs() < 1e-12);
        prop_assert!((p.c - p.a).abs() < 1e-12);
        let b = p.b;
        prop_assert!((b.powi(6) - 2.0 * k * b.powi(4) - 8.0).abs() < 1e-10 * (1.0 + b.powi(6)));
        prop_assert!((p.constant + (b.powi(6) + 4.0) / b.powi(8)).abs() < 1e-12);
        prop_assert!(p.system_residuals().iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn cubic_q_commutes_with_the_reflection(k in -2.0f64..2.5, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let qd = cubic::build_q(&cubic::params_from_k(k).unwrap()).unwrap();
        let z = C64::new(x, y);
        let lhs = qd.eval(-z.conj());
        let rhs = qd.eval(z).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn roots_round_trip(roots in separated_roots(8), lead_re in 0.5f64..2.0) {
        let lead = C64::new(lead_re, 0.3);
        let p = CplxPoly::from_roots(lead, &roots).unwrap();
        let found: Vec<C64> = poly_roots(&p, RootOptions::default())
            .unwrap()
            .iter()
            .flat_map(|c| std::iter::repeat(c.value).take(c.multiplicity))
            .collect();
        prop_assert_eq!(found.len(), roots.len());
        let rebuilt = CplxPoly::from_roots(lead, &found).unwrap();
        let scale = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(p.max_coeff_diff(&rebuilt) < 1e-10 * scale);
    }

    #[test]
    fn planted_common_root_kills_the_resultant(
        common in (-2.0f64..2.0, -2.0f64..2.0),
        f_rest in separated_roots(3),
        g_rest in separated_roots(3),
    ) {
        let r = C64::new(common.0, common.1);
        let mut fr = f_rest.clone();
        fr.push(r);
        let mut gr = g_rest.clone();
        gr.push(r);
        let f = CplxPoly::from_roots(C64::new(1.0, 0.0), &fr).unwrap();
        let g = CplxPoly::from_roots(C64::new(1.0, 0.0), &gr).unwrap();
        prop_assert!(relative_resultant(&f, &g).unwrap() < 1e-10);
    }

    #[test]
    fn resultant_is_the_product_of_root_differences(f_roots in separated_roots(3), g_roots in separated_roots(3)) {
        let f = CplxPoly::from_roots(C64::new(1.0, 0.0), &f_roots).unwrap();
        let g = CplxPoly::from_roots(C64::new(1.0, 0.0), &g_roots).unwrap();
        let want: C64 = f_roots.iter().flat_map(|a| g_roots.iter().map(move |b| a - b)).product();
        let got = sylvester_resultant(&f, &g).unwrap();
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn bracketed_root_has_a_small_residual(r in 0.1f64..3.0, s in -3.0f64..-0.1) {
        // (x - r)(x - s)(x^2 + 1)
        let p = RealPoly::new(vec![r * s, -(r + s), 1.0 + r * s, -(r + s), 1.0]).unwrap();
        let x = real_root_in_interval(&p, 0.05, 3.5, 1e-14).unwrap();
        let (_, dp) = p.eval_with_derivative(x);
        prop_assert!(p.eval(x).abs() <= 1e-12 * (1.0 + dp.abs()));
        prop_assert!((x - r).abs() < 1e-10);
    }

    #[test]
    fn grading_is_increasing_and_invertible(p in 1u32..6, q in 1u32..6, u in 0.001f64..0.999, du in 1e-4f64..1e-2) {
        let g = EndpointGrading::new(p, q);
        let (t, dt) = g.map(u);
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(dt >= 0.0);
        let (t2, _) = g.map((u + du).min(1.0));
        prop_assert!(t2 >= t);
        let (ts, one_minus, _) = g.map_split(u);
        prop_assert!((ts + one_minus - 1.0).abs() < 1e-14);
        prop_assert!((g.map(g.inverse(t)).0 - t).abs() < 1e-12);
    }

    #[test]
    fn emanation_angles_are_equally_spaced(m in 1usize..5, x in -1.0f64..1.0, y in -1.0f64..1.0, other in (2.0f64..3.0, -1.0f64..1.0)) {
        let zeros = vec![
            Zero { location: C64::new(x, y), multiplicity: m },
            // keep the total degree even
            Zero { location: C64::new(other.0, other.1), multiplicity: 2 - m % 2 },
        ];
        let qd = QuadraticDifferential::from_zeros(C64::new(0.3, -0.7), zeros).unwrap();
        for kind in [TrajectoryKind::Horizontal, TrajectoryKind::Vertical] {
            let a = emanation_angles(&qd, 0, kind).unwrap();
            prop_assert_eq!(a.len(), m + 2);
            let step = 2.0 * PI / (m + 2) as f64;
            for w in a.windows(2) {
                prop_assert!((w[1] - w[0] - step).abs() < 1e-9);
            }
            // the level condition (m+2) psi + arg Q^(m)(z0) = pi (mod 2pi) for horizontal
            let target = if kind == TrajectoryKind::Horizontal { PI } else { 0.0 };
            let qm = qd.poly().nth_derivative(m).unwrap().eval(C64::new(x, y));
            for psi in &a {
                prop_assert!(wrap_angle((m + 2) as f64 * psi + qm.arg() - target).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn re_v_is_positive_inside_sectors(j in 0usize..8, frac in 0.25f64..0.75) {
        for pot in [Potential::cubic(0.5), Potential::quintic(ContourClass::new(3, 1))] {
            let d = pot.degree();
            let j = j % d + 1;
            let (lo, hi) = pot.sector(j);
            let theta = lo + frac * (hi - lo);
            prop_assert_eq!(pot.sector_of(theta).unwrap(), SectorLabel::Sector(j));
            prop_assert!(pot.re_v(C64::from_polar(10.0, theta)) > 0.0);
            let (lo, hi) = pot.complementary_sector(j);
            let theta = lo + frac * (hi - lo);
            prop_assert_eq!(pot.sector_of(theta).unwrap(), SectorLabel::Complementary(j));
            prop_assert!(pot.re_v(C64::from_polar(10.0, theta)) < 0.0);
        }
    }
}
