use scurve_core::family::{equilibrium, support, Family};
use scurve_core::orthopoly::{
    axis_split, compare_to_measure, hankel_solve, moments, moments_on, orthogonality_residuals, quadrature_contour,
    second_contour_vertex, solve_many, Truncation,
};
use scurve_core::potential::Potential;
use scurve_core::quaddiff::TraceOptions;
use scurve_core::quintic::Branch;
use scurve_core::C64;

/// Zeros of `P_8` for `K = 0`, from an independent 60-digit computation
/// (ray quadrature, LU solve, polynomial roots).
const K0_P8_ZEROS: [(f64, f64); 4] = [
    (0.157433991588533, 0.655472357595704),
    (0.468041041009527, 0.696225120520666),
    (0.772788118214979, 0.770761522440340),
    (1.088963981631254, 0.876671891862082),
];

#[test]
fn k0_degree_eight_zeros_are_frozen() {
    let pot = Potential::cubic(0.0);
    let table = moments(&pot, 8, 17, 60).unwrap();
    let op = hankel_solve(&table, 8).unwrap();
    let zeros = op.zeros_f64();
    for &(x, y) in &K0_P8_ZEROS {
        for w in [C64::new(x, y), C64::new(-x, y)] {
            let d = zeros.iter().map(|z| (z - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-13, "{w}: {d:e}");
        }
    }
    assert!(op.max_residual() < 1e-20);
    assert!(op.reflection_asymmetry() < 1e-10);
}

#[test]
fn residuals_hold_on_an_unrelated_contour() {
    let pot = Potential::cubic(0.5);
    let n = 12;
    let table = moments(&pot, n, 2 * n + 1, 60).unwrap();
    let op = hankel_solve(&table, n).unwrap();
    let trunc = Truncation { n, digits: 60 };
    let other = quadrature_contour(&pot, second_contour_vertex(), trunc).unwrap();
    let table2 = moments_on(&pot, n, 2 * n + 1, 60, &other).unwrap();
    let r = orthogonality_residuals(&op.coeffs, &table2);
    assert!(r.iter().all(|x| *x < 1e-20), "{r:?}");
    assert!(table.agreement(&table2) < 1e-30);
}

#[test]
fn zeros_approach_the_arc_as_n_grows() {
    let opts = TraceOptions::default();
    for family in [Family::Cubic { k: 0.0 }, Family::Quintic(Branch::First)] {
        let s = support(family, &opts).unwrap();
        let (measure, _) = equilibrium(&s).unwrap();
        let results = solve_many(&s.potential, &[8, 12, 16], |_| 60);
        let clouds: Vec<_> = results
            .into_iter()
            .map(|r| compare_to_measure(&r.unwrap().1, &measure))
            .collect();
        for w in clouds.windows(2) {
            assert!(w[1].max_distance <= w[0].max_distance, "{family}");
            assert!(w[1].kolmogorov <= w[0].kolmogorov, "{family}");
        }
        assert!(clouds[2].max_distance < 0.1, "{family}: {}", clouds[2].max_distance);
        assert!(clouds.iter().all(|c| c.off_arc.is_empty()));
    }
}

#[test]
fn two_cut_zeros_split_at_the_axis() {
    let pot = Potential::cubic(2.0);
    let table = moments(&pot, 16, 33, 60).unwrap();
    let op = hankel_solve(&table, 16).unwrap();
    let split = axis_split(&op.zeros_f64());
    assert!(split.separated, "{split:?}");
    assert_eq!((split.left, split.right), (8, 8));
    assert!((split.axis_gap - 1.9027251394).abs() < 1e-6, "{split:?}");

    let one_cut = hankel_solve(&moments(&Potential::cubic(0.0), 16, 33, 60).unwrap(), 16).unwrap();
    assert!(!axis_split(&one_cut.zeros_f64()).separated);
}
