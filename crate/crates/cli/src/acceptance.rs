//! The acceptance suite run by `verify`: ten criteria, each a list of checks
//! in a fixed order. Wall-clock times are reported on stderr only.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Result};
use scurve_core::cubic::{self, Phase};
use scurve_core::equilibrium::density_from_q;
use scurve_core::family::{equilibrium, support, EquilibriumSummary, Family, Support};
use scurve_core::orthopoly::{
    axis_split, compare_to_measure, moments_on, orthogonality_residuals, quadrature_contour, second_contour_vertex,
    solve_many, Truncation,
};
use scurve_core::potential::{Potential, SectorLabel};
use scurve_core::quaddiff::{
    connection_search, emanation_angles, hausdorff, level_drift, sector_polygon, teichmuller_check, trace_from_zero,
    trace_from_zero_at, wrap_angle, Endpoint, QPolygon, TraceOptions, Trajectory, TrajectoryKind, TrajectoryStart,
};
use scurve_core::quintic::{self, Branch};
use scurve_core::C64;

use crate::config::RunConfig;
use crate::report::Check;

/// Published decimals of `(a, b, c, d, e)` for the two quintic parameter sets.
pub const QUINTIC_FIRST_DECIMALS: [f64; 5] = [-1.1082, 1.3489, 0.4877, 0.6781, -0.7979];
pub const QUINTIC_SECOND_DECIMALS: [f64; 5] = [-0.9820, 0.7744, -1.3118, 1.0344, 0.1649];

/// Thresholds of the equilibrium checks.
pub const MASS_TOL: f64 = 1e-6;
pub const ON_SUPPORT_TOL: f64 = 1e-4;
pub const OFF_SUPPORT_FLOOR: f64 = -1e-6;
pub const S_PROPERTY_TOL: f64 = 1e-6;
/// Through a double zero the tangent is conditioned like `eps / r^2`.
pub const S_PROPERTY_TOL_CHAIN: f64 = 1e-4;
pub const ENERGY_GAP_TOL: f64 = 1e-5;
/// Tail directions at the escape radius.
pub const TAIL_ANGLE_TOL: f64 = 0.02;
pub const ORTHO_RESIDUAL_TOL: f64 = 1e-20;
pub const ZERO_SYMMETRY_TOL: f64 = 1e-10;
pub const REFLECTION_TOL: f64 = 1e-5;
pub const TEICHMULLER_TOL: f64 = 1e-6;

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub budget: Option<Duration>,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, title: "critical constants", budget: secs(1) },
    Criterion { id: 2, title: "cubic K=0 exact parameters", budget: secs(1) },
    Criterion { id: 3, title: "phase diagram", budget: secs(120) },
    Criterion { id: 4, title: "quintic parameters", budget: secs(10) },
    Criterion { id: 5, title: "quintic connectivity", budget: secs(60) },
    Criterion { id: 6, title: "extension classes", budget: secs(60) },
    Criterion { id: 7, title: "equilibrium verification", budget: secs(120) },
    Criterion { id: 8, title: "orthogonal-polynomial convergence", budget: secs(300) },
    Criterion { id: 9, title: "trajectory engine properties", budget: secs(60) },
    Criterion { id: 10, title: "determinism", budget: None },
];

pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// One line per criterion; carries the wall-clock time, so not part of reports.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        let mut s = format!(
            "criterion {:>2} {} {} ({} checks, {:.2} s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        );
        if !failed.is_empty() {
            s.push_str(&format!(" failed: {}", failed.join("; ")));
        }
        s
    }
}

pub fn run(id: u8, cfg: &RunConfig) -> Result<CriterionOutcome> {
    let criterion = CRITERIA
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| anyhow!("no acceptance criterion {id} (valid: 1-10)"))?;
    let start = Instant::now();
    let mut checks = match id {
        1 => guarded("critical constants", critical_constants),
        2 => guarded("K=0 parameters", k0_parameters),
        3 => guarded("phase sweep", || phase_diagram(cfg)),
        4 => guarded("quintic parameters", quintic_parameters),
        5 => guarded("quintic connections", || quintic_connectivity(&cfg.trace_options())),
        6 => guarded("tails", || extension_classes(&cfg.trace_options())),
        7 => guarded("equilibria", || equilibrium_verification(&cfg.trace_options())),
        8 => guarded("orthogonal polynomials", || orthopoly_convergence(cfg)),
        9 => guarded("trajectories", || trajectory_properties(cfg)),
        _ => guarded("repeat runs", || determinism(cfg)),
    };
    let elapsed = start.elapsed();
    if let Some(budget) = criterion.budget {
        checks.push(Check::holds(format!("runtime within {} s", budget.as_secs()), elapsed <= budget));
    }
    let checks = checks.into_iter().map(|c| c.for_criterion(id)).collect();
    Ok(CriterionOutcome {
        id,
        title: criterion.title,
        checks,
        elapsed,
    })
}

/// An error inside a criterion is a failed check, not an aborted run.
fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::holds(name, false).with_detail(format!("error: {e:#}"))])
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

pub fn critical_constants() -> Result<Vec<Check>> {
    let c = cubic::critical_constants()?;
    let k_from_v = c.v.cbrt() - c.v.powf(-2.0 / 3.0);
    let b_sextic = cubic::solve_b(c.k)?;
    Ok(vec![
        Check::near("v*", c.v, 3.150037074, 1e-6),
        Check::near("K*", c.k, 1.0005424, 1e-6),
        Check::near("a*", c.a, 0.6821733958, 1e-6),
        Check::near("b*", c.b, 1.712251710, 1e-6),
        Check::near("K* from v* against 1/a* - a*^2", k_from_v, 1.0 / c.a - c.a * c.a, 1e-8),
        Check::near("b* against the root of b^6 - 2K*b^4 - 8", b_sextic, c.b, 1e-8),
    ])
}

pub fn k0_parameters() -> Result<Vec<Check>> {
    let p = cubic::params_from_k(0.0)?;
    Ok(vec![
        Check::near("b", p.b, 2f64.sqrt(), 1e-12),
        Check::near("a", p.a, 1.0, 1e-12),
        Check::near("c", p.c, 1.0, 1e-12),
        Check::near("constant term", p.constant, -0.75, 1e-12),
        Check::holds("phase one-cut", p.phase == Phase::OneCut),
    ])
}

/// `count` points evenly spaced in `[-2, 2.5]`, then `0` and `2`.
pub fn sweep_values(count: usize) -> Vec<f64> {
    let mut ks: Vec<f64> = (0..count)
        .map(|i| if count == 1 { -2.0 } else { -2.0 + 4.5 * i as f64 / (count - 1) as f64 })
        .collect();
    ks.extend([0.0, 2.0]);
    ks
}

pub struct PhasePoint {
    pub k: f64,
    pub phase: Phase,
    /// `None` inside the tie band, where no comparison is made.
    pub connected: Option<bool>,
}

impl PhasePoint {
    pub fn agrees(&self) -> bool {
        match self.connected {
            None => true,
            Some(found) => found == (self.phase != Phase::TwoCut),
        }
    }
}

fn phase_point(k: f64, tie: f64, opts: &TraceOptions) -> Result<PhasePoint> {
    let phase = cubic::classify_phase(k, tie)?;
    if phase == Phase::Critical {
        return Ok(PhasePoint { k, phase, connected: None });
    }
    let qd = cubic::build_q(&cubic::params_from_k(k)?)?;
    let found = connection_search(&qd, cubic::LEFT_ZERO, cubic::RIGHT_ZERO, opts)?.is_found();
    Ok(PhasePoint {
        k,
        phase,
        connected: Some(found),
    })
}

/// Classify every `K` and search for the connection, on all cores; results
/// keep the order of `ks`.
pub fn phase_sweep(ks: &[f64], tie: f64, opts: &TraceOptions) -> Result<Vec<PhasePoint>> {
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get()).min(ks.len().max(1));
    let chunk = ks.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|&k| phase_point(k, tie, opts)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("phase worker panicked"))
            .collect()
    })
}

fn phase_diagram(cfg: &RunConfig) -> Result<Vec<Check>> {
    let ks = sweep_values(cfg.sweep_points);
    let points = phase_sweep(&ks, cfg.tolerances.phase_tie, &cfg.trace_options())?;
    let disagreements: Vec<String> = points.iter().filter(|p| !p.agrees()).map(|p| format!("K={}", p.k)).collect();
    let ties = points.iter().filter(|p| p.connected.is_none()).count();
    let at = |k: f64| points.iter().find(|p| p.k == k).expect("appended");
    let k0 = at(0.0);
    let k2 = at(2.0);
    let mut mismatch = Check::at_most("phase/connection disagreements", disagreements.len() as f64, 0.0)
        .with_detail(format!("{} values, {ties} ties skipped", points.len()));
    if !disagreements.is_empty() {
        mismatch = mismatch.with_detail(disagreements.join(", "));
    }
    Ok(vec![
        mismatch,
        Check::holds("K=0 one-cut and connected", k0.phase == Phase::OneCut && k0.connected == Some(true)),
        Check::holds("K=2 two-cut and not connected", k2.phase == Phase::TwoCut && k2.connected == Some(false)),
    ])
}

pub fn quintic_parameters() -> Result<Vec<Check>> {
    let names = ["a", "b", "c", "d", "e"];
    let mut checks = Vec::new();
    for (branch, published) in [(Branch::First, QUINTIC_FIRST_DECIMALS), (Branch::Second, QUINTIC_SECOND_DECIMALS)] {
        let p = branch.index();
        let closed = quintic::closed_form_params(branch);
        for ((name, value), target) in names.iter().zip(closed.as_array()).zip(published) {
            checks.push(Check::near(format!("p={p} {name} against the published decimal"), value, target, 5e-5));
        }
        let numeric = quintic::solve_params_numeric(branch)?;
        let gap = max_of(closed.as_array().iter().zip(numeric.as_array()).map(|(x, y)| (x - y).abs()));
        checks.push(Check::below(format!("p={p} numeric solve against closed forms"), gap, 1e-9));
        checks.push(Check::below(format!("p={p} (sys1) residual"), max_of(closed.sys1_residuals()), 1e-9));
    }
    Ok(checks)
}

/// `p=1`, `p=2`.
pub const QUINTIC_BRANCHES: [Branch; 2] = [Branch::First, Branch::Second];

fn quintic_connectivity(opts: &TraceOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for branch in QUINTIC_BRANCHES {
        let p = branch.index();
        let params = quintic::closed_form_params(branch);
        let qd = quintic::build_q(&params)?;
        let conn = connection_search(&qd, quintic::LEFT_ZERO, quintic::RIGHT_ZERO, opts)?;
        checks.push(Check::holds(format!("p={p} arc z1 -> z2 found"), conn.is_found()));
        if let scurve_core::quaddiff::Connection::Found(arc) = &conn {
            let inside = arc.points.iter().all(|&z| quintic::in_triangle(&params, z, 1e-9));
            checks.push(Check::holds(format!("p={p} arc inside the guard triangle"), inside));
        }
        let guards = quintic::triangle_guards(&params)?;
        checks.push(
            Check::holds(format!("p={p} triangle guards"), guards.holds()).with_detail(format!(
                "min Im D on segment {:.3e}, max Re Q on tilted side {:.3e}",
                guards.segment_min_im_d, guards.tilted_max_re_q
            )),
        );
        checks.push(Check::holds(format!("p={p} half-line guard"), quintic::halfline_guards(&params).holds()));
    }
    Ok(checks)
}

/// Expected tail directions and sector classes, left tail first.
pub fn expected_tails(family: &Family) -> ([f64; 2], [usize; 2]) {
    match family {
        Family::Cubic { .. } => ([5.0 * PI / 6.0, PI / 6.0], [2, 1]),
        Family::Quintic(Branch::First) => ([9.0 * PI / 10.0, PI / 10.0], [3, 1]),
        Family::Quintic(Branch::Second) => ([-7.0 * PI / 10.0, -3.0 * PI / 10.0], [4, 5]),
    }
}

pub fn raw_escape_angle(t: &Trajectory) -> Option<f64> {
    match t.end {
        Endpoint::InfinityDirection { raw_angle, .. } => Some(raw_angle),
        _ => None,
    }
}

/// Tail directions and sector classes of one support.
pub fn tail_checks(s: &Support) -> Vec<Check> {
    let (angles, sectors) = expected_tails(&s.family);
    let class = s.potential.class();
    let mut checks = Vec::new();
    let mut labels = Vec::new();
    for (side, ((tail, want), sector)) in ["left", "right"].iter().zip(s.tails.iter().zip(angles).zip(sectors)) {
        let name = format!("{} {side} tail direction", s.family);
        match raw_escape_angle(tail) {
            Some(raw) => {
                checks.push(Check::at_most(name, wrap_angle(raw - want).abs(), TAIL_ANGLE_TOL).with_detail(format!(
                    "raw {raw:.6}, target {want:.6}"
                )));
                let label = s.potential.sector_of(raw).ok();
                checks.push(Check::holds(
                    format!("{} {side} tail in S{sector}", s.family),
                    label == Some(SectorLabel::Sector(sector)),
                ));
                labels.push(label);
            }
            None => checks.push(Check::holds(name, false).with_detail(format!("tail ends {:?}", tail.end))),
        }
    }
    checks.push(Check::holds(
        format!("{} class {class}", s.family),
        labels == [Some(SectorLabel::Sector(class.from)), Some(SectorLabel::Sector(class.to))],
    ));
    checks
}

fn extension_classes(opts: &TraceOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for family in [
        Family::Cubic { k: 0.0 },
        Family::Cubic { k: 0.5 },
        Family::Quintic(Branch::First),
        Family::Quintic(Branch::Second),
    ] {
        checks.extend(tail_checks(&support(family, opts)?));
    }
    Ok(checks)
}

/// Equilibrium checks for one support; `s_tol` is looser for chains
/// through a double zero.
pub fn equilibrium_checks(family: &Family, eq: &EquilibriumSummary, s_tol: f64) -> Vec<Check> {
    let v = &eq.variational;
    vec![
        Check::near(format!("{family} mass"), eq.mass, 1.0, MASS_TOL),
        Check::below(format!("{family} on-arc |2U + Re V - l|"), v.on_support_deviation, ON_SUPPORT_TOL),
        Check::at_least(format!("{family} off-arc margin"), v.off_support_margin, OFF_SUPPORT_FLOOR),
        Check::holds(format!("{family} 2U + Re V - l increasing along tails"), v.tails_increasing),
        Check::below(format!("{family} S-property residual"), eq.s_property, s_tol),
        Check::below(format!("{family} l-energy identity gap"), eq.energy.consistency_gap, ENERGY_GAP_TOL),
    ]
}

/// The four configurations of the equilibrium criterion, solved concurrently.
pub const EQUILIBRIUM_FAMILIES: [Family; 4] = [
    Family::Cubic { k: 0.0 },
    Family::Cubic { k: 0.5 },
    Family::Quintic(Branch::First),
    Family::Quintic(Branch::Second),
];

fn equilibrium_verification(opts: &TraceOptions) -> Result<Vec<Check>> {
    let summaries: Vec<Result<EquilibriumSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = EQUILIBRIUM_FAMILIES
            .iter()
            .map(|&f| scope.spawn(move || -> Result<EquilibriumSummary> { Ok(equilibrium(&support(f, opts)?)?.1) }))
            .collect();
        handles.into_iter().map(|h| h.join().expect("equilibrium worker panicked")).collect()
    });
    let mut checks = Vec::new();
    for (family, summary) in EQUILIBRIUM_FAMILIES.iter().zip(summaries) {
        let eq = summary?;
        checks.extend(equilibrium_checks(family, &eq, S_PROPERTY_TOL));
        if *family == (Family::Cubic { k: 0.0 }) {
            // closed form for K = 0
            checks.push(Check::near("cubic K=0 l = 2/3 + ln 2", eq.variational.ell, 2.0 / 3.0 + 2f64.ln(), 1e-6));
        }
    }
    Ok(checks)
}

pub const ORTHO_DEGREES: [usize; 3] = [8, 12, 16];

fn orthopoly_convergence(cfg: &RunConfig) -> Result<Vec<Check>> {
    let digits = cfg.digits.unwrap_or(60);
    let opts = cfg.trace_options();
    let mut checks = Vec::new();
    for family in [Family::Cubic { k: 0.0 }, Family::Quintic(Branch::First)] {
        let s = support(family, &opts)?;
        let measure = density_from_q(&s.qd, &s.arcs)?;
        let solved = solve_many(&s.potential, &ORTHO_DEGREES, |_| digits);
        let mut clouds = Vec::new();
        for (&n, r) in ORTHO_DEGREES.iter().zip(solved) {
            let (table, op) = r?;
            let trunc = Truncation { n, digits };
            let other = quadrature_contour(&s.potential, second_contour_vertex(), trunc)?;
            let table2 = moments_on(&s.potential, n, 2 * n + 1, digits, &other)?;
            let residual = max_of(orthogonality_residuals(&op.coeffs, &table2));
            checks.push(Check::below(format!("{family} n={n} orthogonality residual"), residual, ORTHO_RESIDUAL_TOL));
            checks.push(Check::below(
                format!("{family} n={n} moments independent of the contour"),
                table.agreement(&table2),
                ORTHO_RESIDUAL_TOL,
            ));
            checks.push(Check::below(
                format!("{family} n={n} zeros symmetric under z -> -conj z"),
                op.reflection_asymmetry(),
                ZERO_SYMMETRY_TOL,
            ));
            clouds.push(compare_to_measure(&op, &measure));
        }
        let dist: Vec<f64> = clouds.iter().map(|c| c.max_distance).collect();
        let ks: Vec<f64> = clouds.iter().map(|c| c.kolmogorov).collect();
        let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ");
        checks.push(
            Check::holds(format!("{family} max zero-to-arc distance non-increasing"), dist.windows(2).all(|w| w[1] <= w[0]))
                .with_detail(fmt(&dist)),
        );
        checks.push(
            Check::holds(format!("{family} Kolmogorov distance non-increasing"), ks.windows(2).all(|w| w[1] <= w[0]))
                .with_detail(fmt(&ks)),
        );
        if family == (Family::Cubic { k: 0.0 }) {
            checks.push(Check::below("cubic K=0 n=16 max zero-to-arc distance", dist[2], 0.1));
        }
    }
    let pot = Potential::cubic(2.0);
    let (_, op) = solve_many(&pot, &[16], |_| digits).pop().expect("one degree")?;
    let split = axis_split(&op.zeros_f64());
    checks.push(Check::holds("cubic K=2 n=16 zeros split at the imaginary axis", split.separated).with_detail(format!(
        "{} left, {} right, strip {:.4}, max spacing {:.4}",
        split.left, split.right, split.axis_gap, split.max_spacing
    )));
    checks.push(Check::below("cubic K=2 n=16 orthogonality residual", op.max_residual(), ORTHO_RESIDUAL_TOL));
    Ok(checks)
}

fn departure(t: &Trajectory) -> f64 {
    match t.start {
        TrajectoryStart::Zero { angle, .. } => angle,
        TrajectoryStart::Point(_) => (t.points[1] - t.points[0]).arg(),
    }
}

/// Polygons between consecutive escaping trajectories from `zero`: over
/// both kinds interleaved, and over the horizontal ones alone.
fn polygons_at(
    qd: &scurve_core::quaddiff::QuadraticDifferential,
    zero: usize,
    opts: &TraceOptions,
    traced: &mut Vec<Trajectory>,
) -> Result<Vec<QPolygon>> {
    let mut escaping = Vec::new();
    for kind in [TrajectoryKind::Horizontal, TrajectoryKind::Vertical] {
        for k in 0..emanation_angles(qd, zero, kind)?.len() {
            let t = trace_from_zero(qd, zero, k, kind, opts)?;
            if t.end.infinity_angle().is_some() {
                escaping.push(t.clone());
            }
            traced.push(t);
        }
    }
    escaping.sort_by(|a, b| departure(a).total_cmp(&departure(b)));
    let horizontal: Vec<&Trajectory> = escaping.iter().filter(|t| t.kind == TrajectoryKind::Horizontal).collect();
    let all: Vec<&Trajectory> = escaping.iter().collect();
    let mut polys = Vec::new();
    for ring in [all, horizontal] {
        for i in 0..ring.len() {
            let j = (i + 1) % ring.len();
            if i != j {
                polys.push(sector_polygon(qd, ring[i], ring[j])?);
            }
        }
    }
    Ok(polys)
}

fn is_empty_sector(p: &QPolygon, at_zero: f64, at_infinity: f64) -> bool {
    p.interior_orders.is_empty()
        && (p.vertices[0].angle - at_zero).abs() < TEICHMULLER_TOL
        && (p.vertices[1].angle - at_infinity).abs() < TEICHMULLER_TOL
}

fn trajectory_properties(cfg: &RunConfig) -> Result<Vec<Check>> {
    let opts = cfg.trace_options();
    let mut checks = Vec::new();
    let mut traced: Vec<(String, scurve_core::quaddiff::QuadraticDifferential, Trajectory)> = Vec::new();
    for family in EQUILIBRIUM_FAMILIES {
        let s = support(family, &opts)?;
        for t in s.arcs.iter().chain(&s.tails) {
            traced.push((family.to_string(), s.qd.clone(), t.clone()));
        }
    }

    // reflection: trajectories from z2 are mirror images of those from z1
    let mut worst_reflection: f64 = 0.0;
    for family in [Family::Cubic { k: 0.5 }, Family::Quintic(Branch::First)] {
        let qd = family.quadratic_differential()?;
        let (left, right) = family.arc_zeros();
        for kind in [TrajectoryKind::Horizontal, TrajectoryKind::Vertical] {
            for k in 0..emanation_angles(&qd, left, kind)?.len() {
                let a = trace_from_zero(&qd, left, k, kind, &opts)?;
                let b = trace_from_zero_at(&qd, right, PI - departure(&a), kind, &opts)?;
                // compare inside a disk both traces cover
                let r = 0.8 * opts.escape_radius.unwrap_or(10.0 * (1.0 + qd.max_zero_modulus()));
                let clip = |pts: &[C64]| pts.iter().copied().filter(|z| z.norm() < r).collect::<Vec<_>>();
                worst_reflection = worst_reflection.max(hausdorff(&clip(&a.reflected().points), &clip(&b.points)));
                traced.push((family.to_string(), qd.clone(), a));
                traced.push((family.to_string(), qd.clone(), b));
            }
        }
    }
    checks.push(Check::below("reflected trajectories coincide (Hausdorff)", worst_reflection, REFLECTION_TOL));

    // Teichmüller on polygons of the two-cut cubic and both quintic sets
    let mut worst_teich: f64 = 0.0;
    let mut polygons = 0;
    let mut first_set = Vec::new();
    for family in [Family::Cubic { k: 2.0 }, Family::Quintic(Branch::First), Family::Quintic(Branch::Second)] {
        let qd = family.quadratic_differential()?;
        let mut here = Vec::new();
        let polys = polygons_at(&qd, family.arc_zeros().0, &opts, &mut here)?;
        for p in &polys {
            worst_teich = worst_teich.max(teichmuller_check(p).abs());
            polygons += 1;
        }
        if family == Family::Quintic(Branch::First) {
            first_set = polys;
        }
        traced.extend(here.into_iter().map(|t| (family.to_string(), qd.clone(), t)));
    }
    checks.push(
        Check::below("Teichmüller residual on trajectory polygons", worst_teich, TEICHMULLER_TOL)
            .with_detail(format!("{polygons} polygons")),
    );
    // at z1 for p = 1: the horizontal/vertical pair bounds a zero-free sector
    // with angle pi/10 at infinity, and the two escaping horizontal
    // trajectories one with angle pi/5 (no double zero between them)
    checks.push(Check::holds(
        "p=1 zero-free sector at z1: pi/3 opening, pi/10 at infinity",
        first_set.iter().any(|p| is_empty_sector(p, PI / 3.0, PI / 10.0)),
    ));
    checks.push(Check::holds(
        "p=1 horizontal pair at z1: 2pi/3 opening, zero-free, pi/5 at infinity",
        first_set.iter().any(|p| is_empty_sector(p, 2.0 * PI / 3.0, PI / 5.0)),
    ));
    // the alternative with the double zero inside is forced to 3pi/5
    let enclosing = QPolygon {
        vertices: vec![
            scurve_core::quaddiff::PolygonVertex { label: "z1".into(), order: 1, angle: 2.0 * PI / 3.0 },
            scurve_core::quaddiff::PolygonVertex { label: "inf".into(), order: QPolygon::infinity_order(5), angle: 0.0 },
        ],
        interior_orders: vec![2],
    };
    checks.push(Check::near(
        "angle at infinity forced around an enclosed double zero",
        enclosing.forced_angle(1),
        3.0 * PI / 5.0,
        TEICHMULLER_TOL,
    ));

    let (worst, name) = traced
        .iter()
        .map(|(f, qd, t)| (level_drift(qd, t), f))
        .fold((0.0, String::new()), |acc, (d, f)| if d > acc.0 { (d, f.clone()) } else { acc });
    checks.push(
        Check::below("level-set drift on all traced trajectories", worst, cfg.tolerances.drift)
            .with_detail(format!("{} trajectories, worst in {name}", traced.len())),
    );
    Ok(checks)
}

/// Re-run the cheap deterministic criteria in-process and compare the
/// serialized checks; the full two-process comparison lives in the
/// integration tests.
fn determinism(_cfg: &RunConfig) -> Result<Vec<Check>> {
    let once = || -> Result<String> {
        let mut all = critical_constants()?;
        all.extend(k0_parameters()?);
        all.extend(quintic_parameters()?);
        let s = support(Family::Cubic { k: 0.0 }, &TraceOptions::default())?;
        let mut text = serde_json::to_string(&all)?;
        text.push_str(&s.arcs[0].to_csv());
        Ok(text)
    };
    let (a, b) = (once()?, once()?);
    Ok(vec![Check::holds("repeat runs are byte-identical", a == b)
        .with_detail(format!("{} bytes compared", a.len()))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        assert!(critical_constants().unwrap().iter().all(Check::passed));
        assert!(k0_parameters().unwrap().iter().all(Check::passed));
        let q = quintic_parameters().unwrap();
        assert!(q.iter().all(Check::passed), "{:?}", q.iter().filter(|c| !c.passed()).collect::<Vec<_>>());
    }

    #[test]
    fn sweep_covers_the_interval_and_the_anchors() {
        let ks = sweep_values(50);
        assert_eq!(ks.len(), 52);
        assert_eq!(ks[0], -2.0);
        assert!((ks[49] - 2.5).abs() < 1e-15);
        assert_eq!(&ks[50..], &[0.0, 2.0]);
    }

    #[test]
    fn unknown_criterion_is_an_error() {
        let cfg = crate::config::Settings::defaults().resolve().unwrap();
        assert!(run(11, &cfg).is_err());
    }
}
