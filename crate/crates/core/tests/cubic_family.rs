use std::f64::consts::{PI, SQRT_2};

use scurve_core::cubic::{self, Phase};
use scurve_core::potential::{Potential, SectorLabel};
use scurve_core::quaddiff::{
    connection_search, d_value, emanation_angles, hausdorff, level_drift, trace_from_zero, trace_from_zero_at,
    trace_through, Connection, Endpoint, TraceOptions, TrajectoryKind,
};
use scurve_core::C64;

const V_STAR: f64 = 3.150037074084747666;
const A_STAR: f64 = 0.682173395781582585;
const B_STAR: f64 = 1.712251710;
const K_STAR: f64 = 1.000542417927346864;

#[test]
fn critical_constants_are_frozen() {
    let cc = cubic::critical_constants().unwrap();
    assert!((cc.v - V_STAR).abs() < 1e-12, "{}", cc.v);
    assert!((cc.a - A_STAR).abs() < 1e-12, "{}", cc.a);
    assert!((cc.b - B_STAR).abs() < 1e-9, "{}", cc.b);
    assert!((cc.k - K_STAR).abs() < 1e-12, "{}", cc.k);
    assert!((cc.k - (1.0 / cc.a - cc.a * cc.a)).abs() < 1e-12);
    assert!((cc.a * cc.b * cc.b - 2.0).abs() < 1e-12);
    assert!(cubic::v_equation(cc.v).abs() < 1e-10);
    // v = a^{-3}
    assert!((cc.v * cc.a.powi(3) - 1.0).abs() < 1e-12);
}

#[test]
fn b_star_solves_the_sextic_at_k_star() {
    let b = cubic::solve_b(K_STAR).unwrap();
    assert!((b - B_STAR).abs() < 1e-9, "{b}");
}

#[test]
fn k_zero_parameters_are_exact() {
    let p = cubic::params_from_k(0.0).unwrap();
    assert!((p.b - SQRT_2).abs() < 1e-12);
    assert!((p.a - 1.0).abs() < 1e-12);
    assert!((p.c - 1.0).abs() < 1e-12);
    assert!((p.constant + 0.75).abs() < 1e-12);
    assert_eq!(p.phase, Phase::OneCut);
    assert!(p.system_residuals().iter().all(|r| *r < 1e-12));
}

#[test]
fn q_vanishes_at_its_own_zeros() {
    for k in [-1.5, 0.0, 0.5, 2.0] {
        let p = cubic::params_from_k(k).unwrap();
        let qd = cubic::build_q(&p).unwrap();
        for z in p.zeros() {
            assert!(qd.eval(z).norm() < 1e-12, "K={k} z={z}");
        }
    }
}

#[test]
fn f_at_minus_one_is_pi_short_of_the_quoted_value() {
    let f = cubic::f_at_minus_a(1.0).unwrap();
    assert!((f - 0.364852).abs() < 1e-6, "{f}");
    assert!((PI * f - 1.1462).abs() < 1e-4);
}

#[test]
fn phase_at_sample_points() {
    assert_eq!(cubic::classify_phase(0.0, 1e-9).unwrap(), Phase::OneCut);
    assert_eq!(cubic::classify_phase(2.0, 1e-9).unwrap(), Phase::TwoCut);
    assert_eq!(cubic::classify_phase(K_STAR, 1e-9).unwrap(), Phase::Critical);
}

#[test]
fn k0_arc_crosses_the_axis_at_y1_and_tails_end_at_sector_centres() {
    let p = cubic::params_from_k(0.0).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let opts = TraceOptions::default();
    let Connection::Found(arc) = connection_search(&qd, cubic::LEFT_ZERO, cubic::RIGHT_ZERO, &opts).unwrap() else {
        panic!("no connection at K = 0");
    };
    let (y1, _) = cubic::find_y1_y2(&p).unwrap();
    let crossing = arc
        .points
        .windows(2)
        .find(|w| w[0].re <= 0.0 && w[1].re > 0.0)
        .map(|w| w[0].im + (w[1].im - w[0].im) * (-w[0].re) / (w[1].re - w[0].re))
        .unwrap();
    assert!((crossing - y1).abs() < 1e-6, "{crossing} vs {y1}");
    assert!(level_drift(&qd, &arc) < 1e-7);

    let psi = match arc.start {
        scurve_core::quaddiff::TrajectoryStart::Zero { angle, .. } => angle,
        _ => unreachable!(),
    };
    let tail = trace_from_zero_at(&qd, cubic::LEFT_ZERO, psi + PI, TrajectoryKind::Vertical, &opts).unwrap();
    let angle = tail.end.infinity_angle().unwrap();
    assert!((angle - 5.0 * PI / 6.0).abs() < 0.02);
    let pot = Potential::cubic(0.0);
    assert_eq!(pot.sector_of(angle).unwrap(), SectorLabel::Sector(2));
}

#[test]
fn d_on_the_arc_and_on_the_segment() {
    let p = cubic::params_from_k(0.0).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let opts = TraceOptions::default();
    let [_, z1, _] = p.zeros();
    let (y1, _) = cubic::find_y1_y2(&p).unwrap();
    let iy1 = C64::new(0.0, y1);
    let hint = qd.eval(z1 + 0.1).sqrt();
    let d = d_value(&qd, &[z1, iy1], hint, &opts).unwrap();
    assert!(d.im.abs() < 1e-8, "{d}");
    // the segment between the simple zeros lies on Im z = a; the branch sign is
    // fixed once, at the first sample
    let mut sign = 0.0;
    for x in [-1.0, -0.3, 0.0, 0.9] {
        let z = C64::new(x, p.a);
        let d = d_value(&qd, &[z1, z], hint, &opts).unwrap();
        let want = cubic::im_d_on_segment(&p, x).unwrap();
        if sign == 0.0 {
            sign = (d.im / want).signum();
        }
        assert!((sign * d.im - want).abs() < 1e-8, "x={x}: {} vs {want}", d.im);
    }
}

#[test]
fn two_cut_traces_stay_left_and_escape() {
    let p = cubic::params_from_k(2.0).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let opts = TraceOptions::default();
    let mut angles = Vec::new();
    for k in 0..3 {
        let t = trace_from_zero(&qd, cubic::LEFT_ZERO, k, TrajectoryKind::Horizontal, &opts).unwrap();
        assert!(t.points.iter().all(|z| z.re < 1e-9), "trace {k} crosses the axis");
        angles.push(t.end.infinity_angle().expect("escapes").rem_euclid(2.0 * PI));
    }
    angles.sort_by(f64::total_cmp);
    for (got, want) in angles.iter().zip([2.0 * PI / 3.0, PI, 4.0 * PI / 3.0]) {
        assert!((got - want).abs() < 0.02, "{angles:?}");
    }
    assert!(matches!(
        connection_search(&qd, cubic::LEFT_ZERO, cubic::RIGHT_ZERO, &opts).unwrap(),
        Connection::NotFound(_)
    ));
}

#[test]
fn trajectory_through_iy2_escapes_downwards() {
    let p = cubic::params_from_k(0.0).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let (_, y2) = cubic::find_y1_y2(&p).unwrap();
    let (a, b) = trace_through(&qd, C64::new(0.0, y2), TrajectoryKind::Horizontal, &TraceOptions::default()).unwrap();
    let mut ends: Vec<f64> = [a.end, b.end]
        .iter()
        .map(|e| e.infinity_angle().expect("unbounded"))
        .collect();
    ends.sort_by(f64::total_cmp);
    assert!((ends[0] + 2.0 * PI / 3.0).abs() < 0.02, "{ends:?}");
    assert!((ends[1] + PI / 3.0).abs() < 0.02, "{ends:?}");
}

#[test]
fn double_zero_at_k_star_has_four_right_angled_directions() {
    let p = cubic::params_from_k(K_STAR).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let angles = emanation_angles(&qd, cubic::DOUBLE_ZERO, TrajectoryKind::Horizontal).unwrap();
    assert_eq!(angles.len(), 4);
    for w in angles.windows(2) {
        assert!((w[1] - w[0] - PI / 2.0).abs() < 1e-6, "{angles:?}");
    }
    // symmetric about the imaginary axis: the set is closed under psi -> pi - psi
    for a in &angles {
        let m = scurve_core::quaddiff::wrap_angle(PI - a);
        assert!(angles.iter().any(|b| scurve_core::quaddiff::wrap_angle(b - m).abs() < 1e-6));
    }
}

#[test]
fn reflected_trajectories_are_traced_trajectories() {
    let p = cubic::params_from_k(0.5).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let opts = TraceOptions::default();
    for k in 0..3 {
        let left = trace_from_zero(&qd, cubic::LEFT_ZERO, k, TrajectoryKind::Horizontal, &opts).unwrap();
        let psi = match left.start {
            scurve_core::quaddiff::TrajectoryStart::Zero { angle, .. } => angle,
            _ => unreachable!(),
        };
        let right = trace_from_zero_at(&qd, cubic::RIGHT_ZERO, PI - psi, TrajectoryKind::Horizontal, &opts).unwrap();
        // compare inside the escape disk only
        let clip = |pts: &[C64]| pts.iter().copied().filter(|z| z.norm() < 8.0).collect::<Vec<_>>();
        let h = hausdorff(&clip(&left.reflected().points), &clip(&right.points));
        assert!(h < 1e-5, "angle {k}: {h:e}");
        if let Endpoint::InfinityDirection { near_boundary, .. } = right.end {
            assert!(!near_boundary);
        }
    }
}

#[test]
fn polygons_between_escaping_trajectories_satisfy_teichmuller() {
    use scurve_core::quaddiff::{sector_polygon, teichmuller_check};
    let p = cubic::params_from_k(2.0).unwrap();
    let qd = cubic::build_q(&p).unwrap();
    let opts = TraceOptions::default();
    let ts: Vec<_> = (0..3)
        .map(|k| trace_from_zero(&qd, cubic::LEFT_ZERO, k, TrajectoryKind::Horizontal, &opts).unwrap())
        .collect();
    let mut enclosing = 0;
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let poly = sector_polygon(&qd, &ts[i], &ts[j]).unwrap();
        assert!(teichmuller_check(&poly).abs() < 1e-12, "{poly:?}");
        if poly.interior_orders.is_empty() {
            assert!((poly.vertices[1].angle - PI / 3.0).abs() < 1e-12);
        } else {
            // the remaining region holds the double zero and the right zero
            let mut orders = poly.interior_orders.clone();
            orders.sort();
            assert_eq!(orders, vec![1, 2]);
            enclosing += 1;
        }
    }
    assert_eq!(enclosing, 1);
}
