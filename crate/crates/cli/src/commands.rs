//! The five subcommands. Each returns a [`ReportDocument`]; failed checks
//! are part of the report, errors (bad input, numerical breakdown) are not.

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scurve_core::cubic::{self, Phase};
use scurve_core::equilibrium::{log_potential, ArcMeasure};
use scurve_core::family::{equilibrium, support, Family, Support};
use scurve_core::orthopoly::{axis_split, default_digits, hankel_solve, moments, zero_cloud, OrthoPoly};
use scurve_core::quaddiff::{
    connection_search, level_drift, point_polyline_distance, trace_from_zero, trace_through, QuadraticDifferential,
    Trajectory, TrajectoryKind,
};
use scurve_core::quintic;
use scurve_core::C64;
use serde_json::{json, Value};

use crate::acceptance::{self, S_PROPERTY_TOL, S_PROPERTY_TOL_CHAIN};
use crate::config::{Format, RunConfig};
use crate::figure::Figure;
use crate::output::{polyline_csv, ArtifactWriter};
use crate::report::{Check, ReportDocument};

/// Sampled points of the reflection check on `U`.
const SYMMETRY_SAMPLES: usize = 8;
const SYMMETRY_TOL: f64 = 1e-8;

/// Collects checks, results and files for one command.
struct Run<'a> {
    cfg: &'a RunConfig,
    writer: ArtifactWriter,
    checks: Vec<Check>,
    results: serde_json::Map<String, Value>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Self {
            cfg,
            writer: ArtifactWriter::new(cfg),
            checks: Vec::new(),
            results: serde_json::Map::new(),
        }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn result(&mut self, key: &str, value: impl serde::Serialize) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Writes a CSV and returns its name for the figure's source list.
    fn csv(&mut self, name: String, kind: &str, text: &str) -> Result<String> {
        self.writer.write(&name, Format::Csv, kind, text)?;
        Ok(name)
    }

    fn svg(&mut self, name: String, figure: &Figure, title: &str, sources: &[String]) -> Result<()> {
        self.writer.write(&name, Format::Svg, "figure", &figure.render(title, sources))?;
        Ok(())
    }

    fn finish(self, command: String) -> Result<ReportDocument> {
        let report = ReportDocument::new(command, self.cfg.echo.clone(), self.checks, Value::Object(self.results));
        self.writer.finish(report)
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn zeros_json(qd: &QuadraticDifferential) -> Value {
    qd.zeros()
        .iter()
        .map(|z| json!({"re": z.location.re, "im": z.location.im, "multiplicity": z.multiplicity}))
        .collect()
}

pub fn cubic_critical(cfg: &RunConfig) -> Result<ReportDocument> {
    let mut run = Run::new(cfg);
    run.checks = acceptance::critical_constants()?;
    let c = cubic::critical_constants()?;
    run.result("critical", c)?;
    run.finish("cubic --critical".into())
}

pub fn cubic(cfg: &RunConfig) -> Result<ReportDocument> {
    let Family::Cubic { k } = cfg.family else {
        bail!("the cubic command needs family = cubic");
    };
    let mut run = Run::new(cfg);
    let params = cubic::params_from_k(k)?;
    let phase = cubic::classify_phase(k, cfg.tolerances.phase_tie)?;
    run.check(Check::below("parameter system residual", max_of(params.system_residuals()), 1e-12));
    run.result("family", cfg.family.to_string())?;
    run.result("params", params)?;
    run.result("phase", phase.to_string())?;
    if phase == Phase::TwoCut {
        two_cut(&mut run, k)?;
    } else {
        with_support(&mut run)?;
    }
    run.finish(format!("cubic --K {k}"))
}

pub fn quintic(cfg: &RunConfig) -> Result<ReportDocument> {
    let Family::Quintic(branch) = cfg.family else {
        bail!("the quintic command needs family = quintic");
    };
    let mut run = Run::new(cfg);
    let params = quintic::closed_form_params(branch);
    let p = branch.index();
    let published = match p {
        1 => acceptance::QUINTIC_FIRST_DECIMALS,
        _ => acceptance::QUINTIC_SECOND_DECIMALS,
    };
    let gap = max_of(params.as_array().iter().zip(published).map(|(x, y)| (x - y).abs()));
    run.check(Check::below("closed forms against the published decimals", gap, 5e-5));
    run.check(Check::below("(sys1) residual", max_of(params.sys1_residuals()), 1e-9));
    let guards = quintic::triangle_guards(&params)?;
    run.check(Check::holds("triangle guards", guards.holds()));
    run.check(Check::holds("half-line guard", quintic::halfline_guards(&params).holds()));
    run.result("family", cfg.family.to_string())?;
    run.result("class", branch.contour_class().to_string())?;
    run.result("params", params)?;
    run.result("triangle", guards.corners)?;
    with_support(&mut run)?;
    run.finish(format!("quintic --class {},{}", branch.contour_class().from, branch.contour_class().to))
}

/// Arc, tails, equilibrium and figure for a one-cut or critical member.
fn with_support(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let family = cfg.family;
    let opts = cfg.trace_options();
    let s = match support(family, &opts) {
        Ok(s) => s,
        Err(e) => {
            run.check(Check::holds("connecting arc found", false).with_detail(e.to_string()));
            return Ok(());
        }
    };
    run.check(Check::holds("connecting arc found", true).with_detail(format!("{} piece(s)", s.arcs.len())));
    run.result("zeros_of_q", zeros_json(&s.qd))?;
    let arc = s.arc_polyline();
    let (first, last) = (arc[0], *arc.last().expect("nonempty"));
    run.result("arc_endpoints", [first, last])?;

    match family {
        Family::Cubic { k } if s.arcs.len() == 1 => {
            let params = cubic::params_from_k(k)?;
            let (y1, _) = cubic::find_y1_y2(&params)?;
            let crossing = axis_crossing(&arc).context("the arc does not cross the imaginary axis")?;
            run.check(Check::near("arc crosses the imaginary axis at iy1", crossing, y1, 1e-6));
            run.check(Check::holds("crossing lies above -ia", crossing > -params.a));
            run.result("axis_crossing", crossing)?;
        }
        Family::Quintic(branch) => {
            let params = quintic::closed_form_params(branch);
            let inside = arc.iter().all(|&z| quintic::in_triangle(&params, z, 1e-9));
            run.check(Check::holds("arc inside the guard triangle", inside));
            let [z1, z2, ..] = params.zeros();
            run.check(Check::below("arc endpoints at -b + ic, b + ic", (first - z1).norm().max((last - z2).norm()), 1e-4));
        }
        _ => {}
    }

    run.checks.extend(acceptance::tail_checks(&s));
    let drift = max_of(s.arcs.iter().chain(&s.tails).map(|t| level_drift(&s.qd, t)));
    run.check(Check::below("level-set drift", drift, cfg.tolerances.drift));

    let (measure, eq) = equilibrium(&s)?;
    let s_tol = if s.arcs.len() > 1 { S_PROPERTY_TOL_CHAIN } else { S_PROPERTY_TOL };
    run.checks.extend(acceptance::equilibrium_checks(&family, &eq, s_tol));
    let asym = reflection_samples(&measure, &arc, cfg.seed);
    run.check(Check::below(
        format!("U(z) = U(-conj z) at {SYMMETRY_SAMPLES} seeded points"),
        asym,
        SYMMETRY_TOL,
    ));
    run.result("equilibrium", &eq)?;
    run.result(
        "tails",
        s.tails.iter().map(|t| t.end.clone()).collect::<Vec<_>>(),
    )?;

    let tag = family.tag();
    let mut sources = Vec::new();
    sources.push(run.csv(format!("{tag}_arc.csv"), "arc", &polyline_csv(&arc))?);
    sources.push(run.csv(format!("{tag}_tail_left.csv"), "tail", &s.tails[0].to_csv())?);
    sources.push(run.csv(format!("{tag}_tail_right.csv"), "tail", &s.tails[1].to_csv())?);
    run.csv(format!("{tag}_density.csv"), "density", &density_csv(&measure))?;
    run.writer.write_json(&format!("{tag}_equilibrium.json"), "equilibrium", &eq)?;

    let mut fig = base_figure(&s);
    fig.markers(&s.qd.zeros().iter().map(|z| z.location).collect::<Vec<_>>(), 0.05, "black");
    run.svg(format!("{tag}.svg"), &fig, &family.to_string(), &sources)
}

fn base_figure(s: &Support) -> Figure {
    let mut fig = Figure::for_family(&s.family);
    if let Family::Quintic(b) = s.family {
        fig.outline(&quintic::triangle(&quintic::closed_form_params(b)), "#888888");
    }
    fig.path(&s.arc_polyline(), "#c0392b", false);
    for t in &s.tails {
        fig.path(&t.points, "#2c3e50", true);
    }
    fig
}

/// Height at which the polyline meets the imaginary axis.
fn axis_crossing(points: &[C64]) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.re == 0.0 {
            return Some(a.im);
        }
        if a.re * b.re < 0.0 {
            let t = a.re / (a.re - b.re);
            return Some(a.im + t * (b.im - a.im));
        }
        None
    })
}

fn density_csv(measure: &ArcMeasure) -> String {
    use std::fmt::Write;
    let mut out = String::from("index,arclength,re,im,density\n");
    for (i, d) in measure.samples().iter().enumerate() {
        let _ = writeln!(out, "{i},{:.12e},{:.15e},{:.15e},{:.12e}", d.arclength, d.z.re, d.z.im, d.density);
    }
    out
}

/// `max |U(z) - U(-conj z)|` over seeded points of `[-2, 2]^2` away from the arc.
fn reflection_samples(measure: &ArcMeasure, arc: &[C64], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut taken = 0;
    while taken < SYMMETRY_SAMPLES {
        let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if point_polyline_distance(z, arc).0 < 0.05 {
            continue;
        }
        worst = worst.max((log_potential(measure, z) - log_potential(measure, -z.conj())).abs());
        taken += 1;
    }
    worst
}

fn zeros_csv(zeros: &[C64], distances: Option<&[f64]>) -> String {
    use std::fmt::Write;
    let mut out = String::from("index,re,im,dist_to_arc\n");
    for (i, z) in zeros.iter().enumerate() {
        let d = distances.map(|d| format!("{:.12e}", d[i])).unwrap_or_default();
        let _ = writeln!(out, "{i},{:.15e},{:.15e},{d}", z.re, z.im);
    }
    out
}

fn solve_degree(cfg: &RunConfig, family: &Family) -> Result<OrthoPoly> {
    let n = cfg.n;
    if n == 0 || n > cfg.max_n {
        bail!("degree n = {n} outside 1..={}", cfg.max_n);
    }
    let digits = cfg.digits.unwrap_or_else(|| default_digits(n));
    let table = moments(&family.potential(), n, 2 * n + 1, digits)?;
    Ok(hankel_solve(&table, n)?)
}

/// Residual tolerance at `P` digits: a third of the digits.
fn residual_tol(digits: u32) -> f64 {
    10f64.powf(-(digits as f64) / 3.0)
}

fn two_cut(run: &mut Run, k: f64) -> Result<()> {
    let cfg = run.cfg;
    let opts = cfg.trace_options();
    let qd = cubic::build_q(&cubic::params_from_k(k)?)?;
    run.result("zeros_of_q", zeros_json(&qd))?;
    let conn = connection_search(&qd, cubic::LEFT_ZERO, cubic::RIGHT_ZERO, &opts)?;
    run.check(Check::holds("no arc connects the simple zeros", !conn.is_found()));

    let mut traces: Vec<(usize, usize, Trajectory)> = Vec::new();
    for (zero, side) in [(cubic::LEFT_ZERO, -1.0), (cubic::RIGHT_ZERO, 1.0)] {
        for i in 0..3 {
            let t = trace_from_zero(&qd, zero, i, TrajectoryKind::Horizontal, &opts)?;
            let stays = t.points.iter().all(|z| side * z.re > -1e-9);
            run.check(Check::holds(format!("trajectory {i} from z{zero} stays in its half-plane"), stays));
            run.check(Check::holds(format!("trajectory {i} from z{zero} escapes"), t.end.infinity_angle().is_some()));
            traces.push((zero, i, t));
        }
    }
    let drift = max_of(traces.iter().map(|(_, _, t)| level_drift(&qd, t)));
    run.check(Check::below("level-set drift", drift, cfg.tolerances.drift));
    run.result("trajectory_ends", traces.iter().map(|(_, _, t)| t.end.clone()).collect::<Vec<_>>())?;

    let op = solve_degree(cfg, &cfg.family)?;
    let zeros = op.zeros_f64();
    let split = axis_split(&zeros);
    run.check(
        Check::holds(format!("zeros of P_{} split into two clusters", op.n), split.separated).with_detail(format!(
            "{} left, {} right, strip {:.4}, max spacing {:.4}",
            split.left, split.right, split.axis_gap, split.max_spacing
        )),
    );
    run.result("axis_split", split)?;

    let tag = cfg.family.tag();
    let mut sources = Vec::new();
    for (zero, i, t) in &traces {
        sources.push(run.csv(format!("{tag}_trace_z{zero}_{i}.csv"), "trajectory", &t.to_csv())?);
    }
    sources.push(run.csv(format!("{tag}_zeros_n{}.csv", op.n), "zeros", &zeros_csv(&zeros, None))?);
    let mut fig = Figure::for_family(&cfg.family);
    for (_, _, t) in &traces {
        fig.path(&t.points, "#2c3e50", false);
    }
    fig.markers(&qd.zeros().iter().map(|z| z.location).collect::<Vec<_>>(), 0.05, "black");
    fig.markers(&zeros, 0.035, "#c0392b");
    run.svg(format!("{tag}.svg"), &fig, &cfg.family.to_string(), &sources)
}

pub fn trace(cfg: &RunConfig, through: Option<C64>) -> Result<ReportDocument> {
    let mut run = Run::new(cfg);
    let family = cfg.family;
    let opts = cfg.trace_options();
    let qd = family.quadratic_differential()?;
    let kind_name = match cfg.kind {
        TrajectoryKind::Horizontal => "horizontal",
        TrajectoryKind::Vertical => "vertical",
    };
    let pieces: Vec<Trajectory> = match through {
        Some(z) => {
            let (a, b) = trace_through(&qd, z, cfg.kind, &opts)?;
            vec![a, b]
        }
        None => {
            if cfg.zero >= qd.zeros().len() {
                bail!("zero index {} out of range (Q has {} zeros)", cfg.zero, qd.zeros().len());
            }
            vec![trace_from_zero(&qd, cfg.zero, cfg.angle, cfg.kind, &opts)?]
        }
    };
    let pot = family.potential();
    let mut ends = Vec::new();
    for (i, t) in pieces.iter().enumerate() {
        let drift = level_drift(&qd, t);
        run.check(Check::below(format!("piece {i} level-set drift"), drift, cfg.tolerances.drift));
        let truncated = matches!(t.end, scurve_core::quaddiff::Endpoint::Truncated { .. });
        run.check(Check::holds(format!("piece {i} reaches a zero or infinity"), !truncated));
        let sector = t
            .end
            .infinity_angle()
            .map(|a| pot.sector_of(a).map_or_else(|_| "boundary".to_string(), |l| l.to_string()));
        ends.push(json!({
            "start": t.start,
            "end": t.end,
            "sector": sector,
            "level": t.level,
            "drift": drift,
            "arclength": t.arclength(),
            "points": t.points.len(),
        }));
    }
    // one polyline: the first half reversed, then the second
    let points: Vec<C64> = match pieces.as_slice() {
        [a, b] => a.reversed_points().into_iter().chain(b.points.iter().skip(1).copied()).collect(),
        _ => pieces[0].points.clone(),
    };
    let sidecar = json!({
        "family": family.to_string(),
        "kind": kind_name,
        "zero": through.is_none().then_some(cfg.zero),
        "angle_index": through.is_none().then_some(cfg.angle),
        "through": through,
        "pieces": ends,
    });
    let stem = match through {
        Some(_) => format!("{}_trace_through", family.tag()),
        None => format!("{}_trace_z{}_{}_{kind_name}", family.tag(), cfg.zero, cfg.angle),
    };
    let sources = vec![run.csv(format!("{stem}.csv"), "trajectory", &polyline_csv(&points))?];
    run.writer.write_json(&format!("{stem}.json"), "trajectory sidecar", &sidecar)?;
    let mut fig = Figure::for_family(&family);
    fig.path(&points, "#2c3e50", cfg.kind == TrajectoryKind::Vertical);
    fig.markers(&qd.zeros().iter().map(|z| z.location).collect::<Vec<_>>(), 0.05, "black");
    run.svg(format!("{stem}.svg"), &fig, &format!("{family} {kind_name} trajectory"), &sources)?;
    run.results = sidecar.as_object().expect("object").clone();
    run.finish(format!("trace {family}"))
}

pub fn zeros(cfg: &RunConfig) -> Result<ReportDocument> {
    let mut run = Run::new(cfg);
    let family = cfg.family;
    let op = solve_degree(cfg, &family)?;
    let n = op.n;
    let zeros = op.zeros_f64();
    run.check(Check::below("orthogonality residual", op.max_residual(), residual_tol(op.digits)));
    run.check(Check::below("zeros symmetric under z -> -conj z", op.reflection_asymmetry(), 1e-10));
    run.result("family", family.to_string())?;
    run.result("n", n)?;
    run.result("precision", op.digits)?;

    let supported = support(family, &cfg.trace_options()).ok();
    let tag = family.tag();
    let mut sources = Vec::new();
    let mut fig = match &supported {
        Some(s) => base_figure(s),
        None => Figure::for_family(&family),
    };
    let detail = match &supported {
        Some(s) => {
            let measure = scurve_core::equilibrium::density_from_q(&s.qd, &s.arcs)?;
            let cloud = zero_cloud(&zeros, &measure);
            sources.push(run.csv(format!("{tag}_zeros_n{n}.csv"), "zeros", &zeros_csv(&zeros, Some(&cloud.distances)))?);
            sources.push(run.csv(format!("{tag}_arc.csv"), "arc", &polyline_csv(&s.arc_polyline()))?);
            run.result("max_distance_to_arc", cloud.max_distance)?;
            run.result("kolmogorov", cloud.kolmogorov)?;
            json!({"zero_cloud": cloud})
        }
        None => {
            sources.push(run.csv(format!("{tag}_zeros_n{n}.csv"), "zeros", &zeros_csv(&zeros, None))?);
            let split = axis_split(&zeros);
            run.result("axis_split", split)?;
            json!({"axis_split": split})
        }
    };
    let mut doc = json!({"polynomial": op.to_report()});
    doc.as_object_mut().expect("object").extend(detail.as_object().expect("object").clone());
    run.writer.write_json(&format!("{tag}_zeros_n{n}.json"), "zeros", &doc)?;
    fig.markers(&zeros, 0.035, "#c0392b");
    run.svg(format!("{tag}_zeros_n{n}.svg"), &fig, &format!("{family}, zeros of P_{n}"), &sources)?;
    run.finish(format!("zeros {family} --n {n}"))
}

pub fn verify(cfg: &RunConfig, mut progress: impl FnMut(&acceptance::CriterionOutcome)) -> Result<ReportDocument> {
    let mut run = Run::new(cfg);
    let mut summary = Vec::new();
    for &id in &cfg.criteria {
        let outcome = acceptance::run(id, cfg)?;
        progress(&outcome);
        summary.push(json!({
            "id": outcome.id,
            "title": outcome.title,
            "status": if outcome.passed() { "pass" } else { "fail" },
            "checks": outcome.checks.len(),
        }));
        run.checks.extend(outcome.checks);
    }
    run.result("criteria", summary)?;
    run.finish("verify".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_is_interpolated() {
        let pts = [C64::new(-1.0, 0.0), C64::new(1.0, 2.0)];
        assert_eq!(axis_crossing(&pts), Some(1.0));
        assert_eq!(axis_crossing(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]), None);
    }

    #[test]
    fn two_cut_zero_rows_leave_the_distance_blank() {
        let csv = zeros_csv(&[C64::new(1.0, -1.0)], None);
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
        let csv = zeros_csv(&[C64::new(1.0, -1.0)], Some(&[0.25]));
        assert!(csv.lines().nth(1).unwrap().ends_with("2.500000000000e-1"));
    }

    #[test]
    fn residual_tolerance_scales_with_precision() {
        assert!((residual_tol(60) - 1e-20).abs() < 1e-32);
    }
}
