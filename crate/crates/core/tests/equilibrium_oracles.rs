use std::f64::consts::LN_2;

use scurve_core::cubic;
use scurve_core::equilibrium::log_potential;
use scurve_core::family::{equilibrium, support, EquilibriumSummary, Family};
use scurve_core::quaddiff::TraceOptions;
use scurve_core::quintic::Branch;
use scurve_core::C64;

fn summary(family: Family) -> EquilibriumSummary {
    let s = support(family, &TraceOptions::default()).unwrap();
    equilibrium(&s).unwrap().1
}

fn assert_variational(label: &str, e: &EquilibriumSummary, s_tol: f64) {
    assert!((e.mass - 1.0).abs() < 1e-6, "{label}: mass {}", e.mass);
    assert!(e.variational.on_support_deviation < 1e-4, "{label}: {:?}", e.variational);
    assert!(e.variational.off_support_margin >= -1e-6, "{label}: {:?}", e.variational);
    assert!(e.variational.tails_increasing, "{label}");
    assert!(e.s_property < s_tol, "{label}: s {:e}", e.s_property);
    assert!(e.energy.consistency_gap < 1e-5, "{label}: {:?}", e.energy);
    assert!(e.energy.resolution_gap < 1e-5, "{label}: {:?}", e.energy);
    assert!(e.energy.energy < e.energy.uniform_energy, "{label}: not below the uniform density");
}

/// At `K = 0` the energy is `1/2 + (log 2)/2` and `ell = 2/3 + log 2`.
#[test]
fn k0_energy_has_a_closed_form() {
    let e = summary(Family::Cubic { k: 0.0 });
    assert_variational("K=0", &e, 1e-6);
    assert!((e.energy.energy - (0.5 + 0.5 * LN_2)).abs() < 1e-9, "{:?}", e.energy);
    assert!((e.variational.ell - (2.0 / 3.0 + LN_2)).abs() < 1e-9);
    assert!((e.energy.field_term - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn frozen_constants_for_the_other_members() {
    let cases = [
        (Family::Cubic { k: 0.5 }, 0.901262691328, 0.537854163290),
        (Family::Quintic(Branch::First), 1.187652386569, 0.693826193284),
        (Family::Quintic(Branch::Second), 2.297543971262, 1.248771985631),
    ];
    for (family, ell, ev) in cases {
        let e = summary(family);
        assert_variational(&family.to_string(), &e, 1e-6);
        assert!((e.variational.ell - ell).abs() < 1e-8, "{family}: ell {}", e.variational.ell);
        assert!((e.energy.energy - ev).abs() < 1e-8, "{family}: E {}", e.energy.energy);
    }
}

#[test]
fn quintic_field_term_is_one_fifth() {
    for b in [Branch::First, Branch::Second] {
        let e = summary(Family::Quintic(b));
        assert!((e.energy.field_term - 0.2).abs() < 1e-9, "{b:?}: {}", e.energy.field_term);
    }
}

/// The chain through the double zero: conditions hold, but the tangent
/// direction next to the double zero limits the S-property residual.
#[test]
fn critical_chain_through_the_double_zero() {
    let k = cubic::critical_constants().unwrap().k;
    let s = support(Family::Cubic { k }, &TraceOptions::default()).unwrap();
    assert_eq!(s.arcs.len(), 2);
    let (_, e) = equilibrium(&s).unwrap();
    assert_variational("K*", &e, 1e-4);
    assert!((e.variational.ell - 0.522313493880).abs() < 1e-8, "{}", e.variational.ell);
    assert!((e.energy.energy - 0.379478696827).abs() < 1e-8, "{}", e.energy.energy);
}

#[test]
fn potential_is_symmetric_and_has_unit_far_field() {
    let s = support(Family::Quintic(Branch::First), &TraceOptions::default()).unwrap();
    let (m, _) = equilibrium(&s).unwrap();
    for z in [C64::new(0.7, 1.3), C64::new(-2.0, -0.4), C64::new(0.1, -1.5)] {
        let d = log_potential(&m, z) - log_potential(&m, -z.conj());
        assert!(d.abs() < 1e-8, "{z}: {d:e}");
    }
    let far = C64::new(1e6, 0.0);
    assert!((log_potential(&m, far) + far.norm().ln()).abs() < 1e-5);
}
