use std::f64::consts::PI;

use scurve_core::family::{support, Family};
use scurve_core::potential::{Potential, SectorLabel};
use scurve_core::quaddiff::{emanation_angles, level_drift, TraceOptions, TrajectoryKind};
use scurve_core::quintic::{self, Branch};

/// `3 psi = pi - arg Q'(z1)` for the closed-form `Q`, evaluated independently
/// at 30 digits. The printed decimals (-0.1305, 0.5362, -0.7971) do not
/// follow from this `Q`; only the qualitative claim is checked against them.
#[test]
fn emanation_angles_at_the_first_left_zero() {
    let p = quintic::closed_form_params(Branch::First);
    let qd = quintic::build_q(&p).unwrap();
    let got = emanation_angles(&qd, quintic::LEFT_ZERO, TrajectoryKind::Horizontal).unwrap();
    let want = [-0.740280441287 * PI, -0.073613774620 * PI, 0.593052892047 * PI];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 1e-9, "{got:?}");
    }
    // the middle direction is the one entering the triangle, between the
    // tilted side (-pi/4) and the segment to z2 (0)
    let g = quintic::triangle_guards(&p).unwrap();
    assert!((g.inward_angle - got[1]).abs() < 1e-12);
    assert!(got[1] > -PI / 4.0 && got[1] < 0.0);
}

#[test]
fn tilted_side_roots_of_re_q() {
    let p = quintic::closed_form_params(Branch::First);
    let g = quintic::triangle_guards(&p).unwrap();
    let real = &g.tilted_real_roots;
    let want = [-2.5741, -p.b, 0.3469, 1.7393];
    assert_eq!(real.len(), 4, "{real:?}");
    for (r, w) in real.iter().zip(want) {
        assert!((r - w).abs() < 1e-4, "{real:?}");
    }
    let mut pairs: Vec<(f64, f64)> = g
        .tilted_roots
        .iter()
        .filter(|z| z.im > 1e-6)
        .map(|z| (z.re, z.im))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(pairs.len(), 2);
    assert!((pairs[0].0 + 0.6044).abs() < 1e-4 && (pairs[0].1 - 0.3452).abs() < 1e-4, "{pairs:?}");
    assert!((pairs[1].0 + 0.1997).abs() < 1e-4 && (pairs[1].1 - 0.3835).abs() < 1e-4, "{pairs:?}");
}

#[test]
fn guards_hold_for_both_parameter_sets() {
    for b in [Branch::First, Branch::Second] {
        let p = quintic::closed_form_params(b);
        assert!(quintic::triangle_guards(&p).unwrap().holds(), "{b:?} triangle");
        assert!(quintic::halfline_guards(&p).holds(), "{b:?} half-line");
    }
}

#[test]
fn arcs_stay_in_the_triangle_and_tails_reach_their_sectors() {
    let opts = TraceOptions::default();
    for (b, (ta, tb)) in [
        (Branch::First, (9.0 * PI / 10.0, PI / 10.0)),
        (Branch::Second, (-7.0 * PI / 10.0, -3.0 * PI / 10.0)),
    ] {
        let s = support(Family::Quintic(b), &opts).unwrap();
        let p = quintic::closed_form_params(b);
        assert_eq!(s.arcs.len(), 1);
        let arc = &s.arcs[0];
        assert!(arc.points.iter().all(|&z| quintic::in_triangle(&p, z, 1e-9)), "{b:?}");
        assert!(level_drift(&s.qd, arc) < 1e-7);
        let ends = [s.tails[0].end.infinity_angle().unwrap(), s.tails[1].end.infinity_angle().unwrap()];
        assert!(scurve_core::quaddiff::wrap_angle(ends[0] - ta).abs() < 0.02, "{b:?} {ends:?}");
        assert!(scurve_core::quaddiff::wrap_angle(ends[1] - tb).abs() < 0.02, "{b:?} {ends:?}");
        let pot = Potential::quintic(b.contour_class());
        let class = b.contour_class();
        assert_eq!(pot.sector_of(ends[0]).unwrap(), SectorLabel::Sector(class.from));
        assert_eq!(pot.sector_of(ends[1]).unwrap(), SectorLabel::Sector(class.to));
    }
}

#[test]
fn arc_endpoints_match_the_closed_forms() {
    let s = support(Family::Quintic(Branch::First), &TraceOptions::default()).unwrap();
    let p = quintic::closed_form_params(Branch::First);
    let arc = &s.arcs[0];
    let first = arc.points[0];
    let last = *arc.points.last().unwrap();
    assert!((first.re + p.b).abs() < 1e-4 && (first.im - p.c).abs() < 1e-4);
    assert!((last.re - p.b).abs() < 1e-4 && (last.im - p.c).abs() < 1e-4);
}
