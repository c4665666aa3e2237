//! Trajectories of quadratic differentials `-Q(z) dz^2` with polynomial `Q`.
//!
//! Along a horizontal trajectory `Q^{1/2} dz` is purely imaginary, along a
//! vertical one it is real. Both are level sets of
//! `D(z) = (1/(pi i)) \int Q^{1/2}`: `Im D` is constant on horizontal
//! trajectories and `Re D` on vertical ones.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, C64};
use crate::quadrature::gauss_legendre;
use crate::roots::{poly_roots, RootOptions};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: C64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDifferential {
    q: CplxPoly,
    zeros: Vec<Zero>,
}

impl QuadraticDifferential {
    /// Validates that `lead * prod (z - zero)^m` reproduces `q` to `1e-10`
    /// (relative to the largest coefficient).
    pub fn new(q: CplxPoly, zeros: Vec<Zero>) -> Result<Self> {
        if q.degree() % 2 != 0 || q.degree() < 2 {
            return Err(Error::Invalid(format!("Q must have even degree >= 2, got {}", q.degree())));
        }
        let mult: usize = zeros.iter().map(|z| z.multiplicity).sum();
        if mult != q.degree() {
            return Err(Error::Invalid(format!(
                "multiplicities sum to {mult}, expected {}",
                q.degree()
            )));
        }
        let roots: Vec<C64> = zeros
            .iter()
            .flat_map(|z| std::iter::repeat(z.location).take(z.multiplicity))
            .collect();
        let rebuilt = CplxPoly::from_roots(q.leading(), &roots)?;
        let scale = q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let err = rebuilt.max_coeff_diff(&q) / scale;
        if err > 1e-10 {
            return Err(Error::ZeroFactorizationMismatch(err));
        }
        Ok(Self { q, zeros })
    }

    /// Build from the leading coefficient and zeros.
    pub fn from_zeros(lead: C64, zeros: Vec<Zero>) -> Result<Self> {
        let roots: Vec<C64> = zeros
            .iter()
            .flat_map(|z| std::iter::repeat(z.location).take(z.multiplicity))
            .collect();
        let q = CplxPoly::from_roots(lead, &roots)?;
        Self::new(q, zeros)
    }

    /// Zeros located numerically and clustered into multiplicities.
    pub fn from_poly(q: CplxPoly) -> Result<Self> {
        let zeros = poly_roots(&q, RootOptions::default())?
            .into_iter()
            .map(|c| Zero {
                location: c.value,
                multiplicity: c.multiplicity,
            })
            .collect();
        Self::new(q, zeros)
    }

    pub fn poly(&self) -> &CplxPoly {
        &self.q
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.q.eval(z)
    }

    /// `Q ~ c z^(2d-2)` at infinity; returns `d`.
    pub fn half_degree(&self) -> usize {
        self.q.degree() / 2 + 1
    }

    /// The square root of `Q(z)` closest to `reference`.
    pub fn sqrt_near(&self, z: C64, reference: C64) -> C64 {
        let w = self.q.eval(z).sqrt();
        if (w * reference.conj()).re < 0.0 {
            -w
        } else {
            w
        }
    }

    pub fn nearest_zero(&self, z: C64) -> (usize, f64) {
        self.zeros
            .iter()
            .enumerate()
            .map(|(i, zero)| (i, (zero.location - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("Q has zeros")
    }

    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.location.norm()).fold(0.0, f64::max)
    }

    pub fn zero_index(&self, location: C64, tol: f64) -> Option<usize> {
        self.zeros.iter().position(|z| (z.location - location).norm() <= tol)
    }

    /// The `2d` asymptotic directions of unbounded trajectories of `kind`,
    /// in `(-pi, pi]`, ascending.
    pub fn infinity_directions(&self, kind: TrajectoryKind) -> Vec<f64> {
        let d = self.half_degree() as f64;
        // Q^{1/2} ~ sqrt(c) z^(d-1), so D ~ sqrt(c) z^d / (pi i d); horizontal
        // directions make sqrt(c) e^{i d theta} purely imaginary
        let base = 0.5 * PI - 0.5 * self.q.leading().arg();
        let shift = match kind {
            TrajectoryKind::Horizontal => 0.0,
            TrajectoryKind::Vertical => 0.5 * PI,
        };
        let n = 2 * self.half_degree();
        let mut out: Vec<f64> = (0..n)
            .map(|j| wrap_angle((base + shift + j as f64 * PI) / d))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Angle reduced to `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Endpoint {
    /// Entered the capture disk of a zero. `level_gap` is the mismatch between
    /// the level of `D` at the zero and the level carried by the trajectory.
    ZeroHit {
        index: usize,
        distance: f64,
        level_gap: f64,
    },
    /// Crossed the escape radius; `angle` is the admissible direction,
    /// `raw_angle` the measured one.
    InfinityDirection {
        index: usize,
        angle: f64,
        raw_angle: f64,
        near_boundary: bool,
    },
    Truncated { reason: String },
}

impl Endpoint {
    pub fn zero_index(&self) -> Option<usize> {
        match self {
            Endpoint::ZeroHit { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub fn infinity_angle(&self) -> Option<f64> {
        match self {
            Endpoint::InfinityDirection { angle, .. } => Some(*angle),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryStart {
    Zero { index: usize, angle: f64 },
    Point(C64),
}

/// Polyline with `D` and the tracked branch of `Q^{1/2}` at every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub start: TrajectoryStart,
    pub end: Endpoint,
    pub points: Vec<C64>,
    /// `D` relative to the start (the zero, or the regular start point).
    pub d_values: Vec<C64>,
    /// Tracked `Q^{1/2}`; zero at vertices that are zeros of `Q`.
    pub branch: Vec<C64>,
    pub branch_seed: C64,
    /// The constant value of `Im D` (horizontal) or `Re D` (vertical).
    pub level: f64,
}

impl Trajectory {
    pub fn arclength(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn cumulative_arclength(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        s.push(0.0);
        for w in self.points.windows(2) {
            acc += (w[1] - w[0]).norm();
            s.push(acc);
        }
        s
    }

    /// Image under `z -> -conj(z)`, with `D -> -conj(D)`.
    pub fn reflected(&self) -> Self {
        let mut t = self.clone();
        t.points = self.points.iter().map(|z| -z.conj()).collect();
        t.d_values = self.d_values.iter().map(|d| -d.conj()).collect();
        t.branch = self.branch.iter().map(|w| w.conj()).collect();
        t
    }

    /// `(index, arclength, re, im)` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,arclength,re,im\n");
        for (i, (z, s)) in self.points.iter().zip(self.cumulative_arclength()).enumerate() {
            let _ = writeln!(out, "{i},{s:.12e},{:.15e},{:.15e}", z.re, z.im);
        }
        out
    }

    /// Reverse orientation (end becomes start); endpoint metadata is kept.
    pub fn reversed_points(&self) -> Vec<C64> {
        self.points.iter().rev().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Capture radius is `capture_factor * (1 + |zero|)`.
    pub capture_factor: f64,
    pub seed_radius: f64,
    /// `None` means `10 * (1 + max |zero|)`.
    pub escape_radius: Option<f64>,
    pub max_points: usize,
    /// Allowed level drift per unit `(1 + arclength)`.
    pub drift_tol: f64,
    pub angle_tol: f64,
    pub max_step: f64,
    /// Bound on the chord/arc deviation per step, relative to `1 + |z|`.
    pub sagitta_tol: f64,
    /// Tolerance on the level mismatch at a captured zero.
    pub level_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            capture_factor: 1e-5,
            seed_radius: 1e-4,
            escape_radius: None,
            max_points: 1_000_000,
            drift_tol: 1e-7,
            angle_tol: 0.02,
            max_step: 0.05,
            sagitta_tol: 1e-7,
            level_tol: 1e-6,
        }
    }
}

impl TraceOptions {
    fn capture_radius(&self, zero: &Zero) -> f64 {
        self.capture_factor * (1.0 + zero.location.norm())
    }

    fn escape(&self, qd: &QuadraticDifferential) -> f64 {
        self.escape_radius.unwrap_or(10.0 * (1.0 + qd.max_zero_modulus()))
    }
}

/// Directions `psi` in `(-pi, pi]`, ascending, in which trajectories of
/// `kind` leave a zero of multiplicity `m`: `(m+2) psi = pi - arg Q^(m)(z0)`
/// (horizontal) or `-arg Q^(m)(z0)` (vertical), mod `2 pi`.
pub fn emanation_angles(qd: &QuadraticDifferential, zero_index: usize, kind: TrajectoryKind) -> Result<Vec<f64>> {
    let zero = qd
        .zeros
        .get(zero_index)
        .ok_or_else(|| Error::Invalid(format!("zero index {zero_index} out of range")))?;
    let m = zero.multiplicity;
    let dq = qd
        .q
        .nth_derivative(m)
        .ok_or_else(|| Error::Invalid("multiplicity exceeds degree".into()))?;
    let arg = dq.eval(zero.location).arg();
    let rhs = match kind {
        TrajectoryKind::Horizontal => PI - arg,
        TrajectoryKind::Vertical => -arg,
    };
    let k = (m + 2) as f64;
    let mut out: Vec<f64> = (0..m + 2)
        .map(|j| wrap_angle((rhs + 2.0 * PI * j as f64) / k))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Unit tangent of a trajectory of `kind` for branch value `w`, orientation `sigma`.
fn tangent(w: C64, kind: TrajectoryKind, sigma: f64) -> C64 {
    let t = match kind {
        TrajectoryKind::Horizontal => I * w.conj(),
        TrajectoryKind::Vertical => w.conj(),
    };
    t / t.norm() * sigma
}

fn level_of(d: C64, kind: TrajectoryKind) -> f64 {
    match kind {
        TrajectoryKind::Horizontal => d.im,
        TrajectoryKind::Vertical => d.re,
    }
}

/// `(1/(pi i)) \int_a^b Q^{1/2}` on the straight chord, branch continued from `w_a`.
///
/// The chord must stay away from zeros; `order` Gauss points per panel.
pub fn chord_integral(qd: &QuadraticDifferential, a: C64, b: C64, w_a: C64, panels: usize, order: usize) -> (C64, C64) {
    let rule = gauss_legendre(order);
    let delta = b - a;
    let mut total = C64::new(0.0, 0.0);
    let mut w_ref = w_a;
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        let hi = (p + 1) as f64 / panels as f64;
        let mut s = C64::new(0.0, 0.0);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let u = lo + 0.5 * (hi - lo) * (x + 1.0);
            let w = qd.sqrt_near(a + delta * u, w_ref);
            w_ref = w;
            s += w * *wt;
        }
        total += s * (0.5 * (hi - lo));
    }
    let w_b = qd.sqrt_near(b, w_ref);
    (total * delta / (PI * I), w_b)
}

/// `(1/(pi i)) \int_{zero}^{z} Q^{1/2}` along the straight segment, using
/// `s = zero + (z - zero) v^2`; `w_z` fixes the branch at `z`.
pub fn d_from_zero(qd: &QuadraticDifferential, zero: C64, z: C64, w_z: C64, panels: usize) -> C64 {
    let rule = gauss_legendre(16);
    let delta = z - zero;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        let hi = (p + 1) as f64 / panels as f64;
        let mut s = C64::new(0.0, 0.0);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let v = lo + 0.5 * (hi - lo) * (x + 1.0);
            // along the ray from the zero, Q^{1/2} keeps the phase of w_z
            let w = qd.sqrt_near(zero + delta * v * v, w_z);
            s += w * (2.0 * v) * *wt;
        }
        total += s * (0.5 * (hi - lo));
    }
    total * delta / (PI * I)
}

/// Number of panels so that each panel is short relative to the distance to
/// the nearest zero not at the endpoints.
fn panels_for(qd: &QuadraticDifferential, a: C64, b: C64, skip: &[usize]) -> usize {
    let len = (b - a).norm();
    let dist = qd
        .zeros
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, z)| point_segment_distance(z.location, a, b))
        .fold(f64::INFINITY, f64::min);
    if !dist.is_finite() || dist <= 0.0 {
        return 64;
    }
    ((2.0 * len / dist).ceil() as usize).clamp(1, 4096)
}

pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Distance from `p` to a polyline and the fractional vertex position of the nearest point.
pub fn point_polyline_distance(p: C64, line: &[C64]) -> (f64, f64) {
    if line.len() == 1 {
        return ((p - line[0]).norm(), 0.0);
    }
    let mut best = (f64::INFINITY, 0.0);
    for (i, w) in line.windows(2).enumerate() {
        let d = w[1] - w[0];
        let l2 = d.norm_sqr();
        let t = if l2 == 0.0 {
            0.0
        } else {
            (((p - w[0]) * d.conj()).re / l2).clamp(0.0, 1.0)
        };
        let dist = (p - (w[0] + d * t)).norm();
        if dist < best.0 {
            best = (dist, i as f64 + t);
        }
    }
    best
}

/// Symmetric Hausdorff distance between two polylines (vertices against segments).
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|&p| point_polyline_distance(p, y).0)
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// `D(z) - D(z_ref)` along `path` (which must start at `z_ref` and end at `z`).
///
/// Endpoints may be zeros of `Q`; interior points must stay outside the
/// capture radius of every zero. `branch_hint` selects the square root at the
/// first non-zero vertex.
pub fn d_value(
    qd: &QuadraticDifferential,
    path: &[C64],
    branch_hint: C64,
    opts: &TraceOptions,
) -> Result<C64> {
    if path.len() < 2 {
        return Ok(C64::new(0.0, 0.0));
    }
    let tol_hit = |z: C64| {
        qd.zeros
            .iter()
            .position(|zero| (zero.location - z).norm() <= 1e-14 * (1.0 + zero.location.norm()))
    };
    // interior vertices and segments must avoid zeros
    for (k, &p) in path.iter().enumerate() {
        let endpoint = k == 0 || k == path.len() - 1;
        for (i, zero) in qd.zeros.iter().enumerate() {
            let d = (p - zero.location).norm();
            if !endpoint && d < opts.capture_radius(zero) {
                return Err(Error::BranchAmbiguity { zero_index: i, distance: d });
            }
        }
    }
    for (k, w) in path.windows(2).enumerate() {
        for (i, zero) in qd.zeros.iter().enumerate() {
            let at_end = (k == 0 && tol_hit(w[0]) == Some(i)) || (k == path.len() - 2 && tol_hit(w[1]) == Some(i));
            if at_end {
                continue;
            }
            let d = point_segment_distance(zero.location, w[0], w[1]);
            if d < opts.capture_radius(zero) {
                return Err(Error::BranchAmbiguity { zero_index: i, distance: d });
            }
        }
    }
    let mut total = C64::new(0.0, 0.0);
    let start_zero = tol_hit(path[0]);
    let mut w;
    let mut first = 0;
    if let Some(zi) = start_zero {
        // singular first segment
        let z1 = path[1];
        w = qd.sqrt_near(z1, branch_hint);
        let panels = panels_for(qd, path[0], z1, &[zi]).max(4);
        total += d_from_zero(qd, qd.zeros[zi].location, z1, w, panels);
        first = 1;
    } else {
        w = qd.sqrt_near(path[0], branch_hint);
    }
    let last = path.len() - 1;
    let end_zero = tol_hit(path[last]);
    let stop = if end_zero.is_some() { last - 1 } else { last };
    for k in first..stop {
        let panels = panels_for(qd, path[k], path[k + 1], &[]);
        let (dd, wb) = chord_integral(qd, path[k], path[k + 1], w, panels, 16);
        total += dd;
        w = wb;
    }
    if let Some(zi) = end_zero {
        if stop >= first {
            let panels = panels_for(qd, path[last], path[stop], &[zi]).max(4);
            total -= d_from_zero(qd, qd.zeros[zi].location, path[stop], w, panels);
        }
    }
    Ok(total)
}

/// Maximum deviation of the level of `D` from the trajectory's constant,
/// recomputed independently along the stored polyline, per `1 + arclength`.
pub fn level_drift(qd: &QuadraticDifferential, traj: &Trajectory) -> f64 {
    let pts = &traj.points;
    if pts.len() < 2 {
        return 0.0;
    }
    let hint = traj.branch.iter().copied().find(|w| w.norm() > 0.0).unwrap_or(C64::new(1.0, 0.0));
    let start_zero = qd
        .zeros
        .iter()
        .position(|z| (z.location - pts[0]).norm() <= 1e-14 * (1.0 + z.location.norm()));
    let mut d = C64::new(0.0, 0.0);
    let mut w;
    let mut k0 = 0;
    if let Some(zi) = start_zero {
        w = qd.sqrt_near(pts[1], hint);
        d = d_from_zero(qd, pts[0], pts[1], w, 4);
        let _ = zi;
        k0 = 1;
    } else {
        w = qd.sqrt_near(pts[0], hint);
    }
    let mut worst = (level_of(d, traj.kind) - traj.level).abs();
    let mut s = (pts[k0] - pts[0]).norm();
    let last = pts.len() - 1;
    let end_is_zero = matches!(traj.end, Endpoint::ZeroHit { .. })
        && qd.zeros.iter().any(|z| (z.location - pts[last]).norm() <= 1e-14 * (1.0 + z.location.norm()));
    let stop = if end_is_zero { last - 1 } else { last };
    for k in k0..stop {
        let (dd, wb) = chord_integral(qd, pts[k], pts[k + 1], w, 1, 16);
        d += dd;
        w = wb;
        s += (pts[k + 1] - pts[k]).norm();
        worst = worst.max((level_of(d, traj.kind) - traj.level).abs() / (1.0 + s));
    }
    worst
}

struct Tracer<'a> {
    qd: &'a QuadraticDifferential,
    kind: TrajectoryKind,
    sigma: f64,
    opts: &'a TraceOptions,
    level: f64,
}

impl Tracer<'_> {
    fn direction(&self, z: C64, w_ref: C64) -> (C64, C64) {
        let w = self.qd.sqrt_near(z, w_ref);
        (tangent(w, self.kind, self.sigma), w)
    }

    /// Move `z` transversally so that the level of `d` matches `self.level`.
    /// Returns corrected `(z, d, w)`.
    fn correct(&self, z0: C64, d0: C64, w0: C64, mut z: C64) -> (C64, C64, C64) {
        let (mut d, mut w) = {
            let (dd, w) = chord_integral(self.qd, z0, z, w0, 1, 8);
            (d0 + dd, w)
        };
        for _ in 0..4 {
            let e = level_of(d, self.kind) - self.level;
            if e.abs() <= 1e-15 * (1.0 + d.norm()) {
                break;
            }
            let delta = match self.kind {
                TrajectoryKind::Horizontal => e * PI / w,
                TrajectoryKind::Vertical => -e * PI * I / w,
            };
            z += delta;
            let (dd, wn) = chord_integral(self.qd, z0, z, w0, 1, 8);
            d = d0 + dd;
            w = wn;
        }
        (z, d, w)
    }

    fn run(
        &self,
        start: TrajectoryStart,
        mut points: Vec<C64>,
        mut d_values: Vec<C64>,
        mut branch: Vec<C64>,
        start_zero: Option<usize>,
    ) -> Trajectory {
        let qd = self.qd;
        let opts = self.opts;
        let escape = opts.escape(qd);
        let mut z = *points.last().expect("seeded");
        let mut d = *d_values.last().expect("seeded");
        let mut w = *branch.last().expect("seeded");
        let branch_seed = w;
        let mut h = opts.seed_radius.min(opts.max_step) * 0.5;
        let mut left_start = start_zero.is_none();
        let end;
        loop {
            if points.len() >= opts.max_points {
                end = Endpoint::Truncated {
                    reason: "budget".into(),
                };
                break;
            }
            let (_, dist) = qd.nearest_zero(z);
            let h_cap = (opts.max_step * z.norm().max(1.0)).min(0.25 * dist);
            h = h.min(h_cap);
            if h < 1e-14 * (1.0 + z.norm()) {
                end = Endpoint::Truncated {
                    reason: "step underflow".into(),
                };
                break;
            }
            let (k1, w1) = self.direction(z, w);
            let (k2, w2) = self.direction(z + k1 * (0.5 * h), w1);
            let (k3, _) = self.direction(z + k2 * (0.5 * h), w2);
            let (k4, w4) = self.direction(z + k3 * h, w2);
            let pred = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let turn = (k4 * k1.conj()).arg().abs();
            let jump = (w4 * w.conj()).arg().abs();
            let sagitta = h * turn / 8.0;
            if sagitta > opts.sagitta_tol * (1.0 + z.norm()) || turn > 0.2 || jump > 0.25 * PI {
                h *= 0.5;
                continue;
            }
            let (zn, dn, wn) = self.correct(z, d, w, pred);
            if (wn * w.conj()).arg().abs() > 0.25 * PI {
                h *= 0.5;
                continue;
            }
            z = zn;
            d = dn;
            w = wn;
            points.push(z);
            d_values.push(d);
            branch.push(w);
            if sagitta < 0.2 * opts.sagitta_tol * (1.0 + z.norm()) {
                h *= 1.5;
            }

            if let Some(si) = start_zero {
                if !left_start && (z - qd.zeros[si].location).norm() > 2.0 * opts.seed_radius {
                    left_start = true;
                }
            }
            let mut hit = None;
            for (i, zero) in qd.zeros.iter().enumerate() {
                if Some(i) == start_zero && !left_start {
                    continue;
                }
                let dist = (z - zero.location).norm();
                if dist < opts.capture_radius(zero) {
                    hit = Some((i, dist));
                    break;
                }
            }
            if let Some((i, dist)) = hit {
                let loc = qd.zeros[i].location;
                let d_zero = d - d_from_zero(qd, loc, z, w, 4);
                points.push(loc);
                d_values.push(d_zero);
                branch.push(C64::new(0.0, 0.0));
                end = Endpoint::ZeroHit {
                    index: i,
                    distance: dist,
                    level_gap: level_of(d_zero, self.kind) - self.level,
                };
                break;
            }
            if z.norm() > escape {
                end = self.classify_infinity(&points);
                break;
            }
        }
        Trajectory {
            kind: self.kind,
            start,
            end,
            points,
            d_values,
            branch,
            branch_seed,
            level: self.level,
        }
    }

    fn classify_infinity(&self, points: &[C64]) -> Endpoint {
        let r_end = points.last().expect("nonempty").norm();
        // average direction over the last tenth of the radius
        let mut acc = C64::new(0.0, 0.0);
        for z in points.iter().rev() {
            if z.norm() < 0.9 * r_end {
                break;
            }
            acc += z / z.norm();
        }
        let raw = acc.arg();
        let dirs = self.qd.infinity_directions(self.kind);
        let (index, angle) = dirs
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| angle_distance(raw, a.1).total_cmp(&angle_distance(raw, b.1)))
            .expect("directions nonempty");
        let err = angle_distance(raw, angle);
        if err > self.opts.angle_tol {
            return Endpoint::Truncated {
                reason: format!("direction {raw:.6} is {err:.3e} rad from the nearest admissible angle"),
            };
        }
        Endpoint::InfinityDirection {
            index,
            angle,
            raw_angle: raw,
            near_boundary: err > 0.5 * self.opts.angle_tol,
        }
    }
}

/// Trace from a regular point in (approximately) `direction`.
pub fn trace(
    qd: &QuadraticDifferential,
    start: C64,
    direction: f64,
    kind: TrajectoryKind,
    opts: &TraceOptions,
) -> Result<Trajectory> {
    let (zi, dist) = qd.nearest_zero(start);
    if dist < opts.capture_radius(&qd.zeros[zi]) {
        return Err(Error::Invalid(format!(
            "start point lies within the capture radius of zero {zi}; use trace_from_zero"
        )));
    }
    let w = qd.eval(start).sqrt();
    let t = tangent(w, kind, 1.0);
    let dir = C64::from_polar(1.0, direction);
    let sigma = if (t * dir.conj()).re >= 0.0 { 1.0 } else { -1.0 };
    let tracer = Tracer {
        qd,
        kind,
        sigma,
        opts,
        level: 0.0,
    };
    Ok(tracer.run(
        TrajectoryStart::Point(start),
        vec![start],
        vec![C64::new(0.0, 0.0)],
        vec![w],
        None,
    ))
}

/// Trace from a zero along its `angle_index`-th emanation direction of `kind`.
pub fn trace_from_zero(
    qd: &QuadraticDifferential,
    zero_index: usize,
    angle_index: usize,
    kind: TrajectoryKind,
    opts: &TraceOptions,
) -> Result<Trajectory> {
    let angles = emanation_angles(qd, zero_index, kind)?;
    let angle = *angles
        .get(angle_index)
        .ok_or_else(|| Error::Invalid(format!("angle index {angle_index} out of range")))?;
    trace_from_zero_at(qd, zero_index, angle, kind, opts)
}

/// Trace from a zero along the emanation direction of `kind` nearest to `angle`.
pub fn trace_from_zero_at(
    qd: &QuadraticDifferential,
    zero_index: usize,
    angle: f64,
    kind: TrajectoryKind,
    opts: &TraceOptions,
) -> Result<Trajectory> {
    let angles = emanation_angles(qd, zero_index, kind)?;
    let psi = angles
        .iter()
        .copied()
        .min_by(|a, b| angle_distance(*a, angle).total_cmp(&angle_distance(*b, angle)))
        .expect("m+2 >= 2 angles");
    let zero = qd.zeros[zero_index].location;
    let seed = zero + C64::from_polar(opts.seed_radius, psi);
    let w = qd.eval(seed).sqrt();
    let d = d_from_zero(qd, zero, seed, w, 2);
    let t = tangent(w, kind, 1.0);
    let sigma = if (t * C64::from_polar(1.0, psi).conj()).re >= 0.0 { 1.0 } else { -1.0 };
    let tracer = Tracer {
        qd,
        kind,
        sigma,
        opts,
        level: 0.0,
    };
    // pull the seed onto the level set of the zero
    let (seed, d, w) = {
        let e = level_of(d, kind);
        let delta = match kind {
            TrajectoryKind::Horizontal => e * PI / w,
            TrajectoryKind::Vertical => -e * PI * I / w,
        };
        let s = seed + delta;
        let ws = qd.sqrt_near(s, w);
        (s, d_from_zero(qd, zero, s, ws, 2), ws)
    };
    Ok(tracer.run(
        TrajectoryStart::Zero {
            index: zero_index,
            angle: psi,
        },
        vec![zero, seed],
        vec![C64::new(0.0, 0.0), d],
        vec![C64::new(0.0, 0.0), w],
        Some(zero_index),
    ))
}

/// Trace both ways through a regular point; returns the two halves.
pub fn trace_through(
    qd: &QuadraticDifferential,
    point: C64,
    kind: TrajectoryKind,
    opts: &TraceOptions,
) -> Result<(Trajectory, Trajectory)> {
    let t = tangent(qd.eval(point).sqrt(), kind, 1.0);
    let a = trace(qd, point, t.arg(), kind, opts)?;
    let b = trace(qd, point, (-t).arg(), kind, opts)?;
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Connection {
    Found(Trajectory),
    NotFound(Vec<Endpoint>),
}

impl Connection {
    pub fn is_found(&self) -> bool {
        matches!(self, Connection::Found(_))
    }
}

/// Look for a horizontal trajectory from `zero_a` that ends at `zero_b`.
pub fn connection_search(
    qd: &QuadraticDifferential,
    zero_a: usize,
    zero_b: usize,
    opts: &TraceOptions,
) -> Result<Connection> {
    if zero_a == zero_b {
        return Err(Error::Invalid("connection endpoints coincide".into()));
    }
    let angles = emanation_angles(qd, zero_a, TrajectoryKind::Horizontal)?;
    let mut ends = Vec::with_capacity(angles.len());
    for k in 0..angles.len() {
        let t = trace_from_zero(qd, zero_a, k, TrajectoryKind::Horizontal, opts)?;
        if let Endpoint::ZeroHit { index, level_gap, .. } = t.end {
            if index == zero_b && level_gap.abs() <= opts.level_tol {
                return Ok(Connection::Found(t));
            }
        }
        ends.push(t.end.clone());
    }
    Ok(Connection::NotFound(ends))
}

/// A vertex of a Q-polygon: a point of order `order` with interior angle `angle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonVertex {
    pub label: String,
    pub order: i64,
    pub angle: f64,
}

/// Simple closed curve made of trajectories, with its corners and the orders
/// of the critical points it encloses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPolygon {
    pub vertices: Vec<PolygonVertex>,
    pub interior_orders: Vec<i64>,
}

impl QPolygon {
    /// Order of the point at infinity for `Q` of degree `2d - 2`.
    pub fn infinity_order(d: usize) -> i64 {
        -(2 * d as i64 + 2)
    }

    /// Teichmüller's identity `sum (1 - phi_j (n_j+2)/(2 pi)) = 2 + sum n_i`
    /// solved for the angle of the vertex at `index`.
    pub fn forced_angle(&self, index: usize) -> f64 {
        let rhs = 2.0 + self.interior_orders.iter().sum::<i64>() as f64;
        let others: f64 = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, v)| 1.0 - v.angle * (v.order as f64 + 2.0) / (2.0 * PI))
            .sum();
        let v = &self.vertices[index];
        (1.0 - (rhs - others)) * 2.0 * PI / (v.order as f64 + 2.0)
    }
}

/// Left side minus right side of Teichmüller's identity.
pub fn teichmuller_check(polygon: &QPolygon) -> f64 {
    let lhs: f64 = polygon
        .vertices
        .iter()
        .map(|v| 1.0 - v.angle * (v.order as f64 + 2.0) / (2.0 * PI))
        .sum();
    let rhs = 2.0 + polygon.interior_orders.iter().sum::<i64>() as f64;
    lhs - rhs
}

/// Winding number of the closed polyline `ring` around `p`.
pub fn winding_number(ring: &[C64], p: C64) -> i64 {
    let mut total = 0.0;
    for k in 0..ring.len() {
        let a = ring[k] - p;
        let b = ring[(k + 1) % ring.len()] - p;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Q-polygon bounded by two unbounded trajectories `a`, `b` leaving the same
/// zero, taking the region swept counterclockwise from `a` to `b`.
///
/// Corner angles come from the emanation directions and the admissible
/// directions at infinity; enclosed zeros are found by winding number of
/// the two polylines closed by a circular arc outside both.
pub fn sector_polygon(qd: &QuadraticDifferential, a: &Trajectory, b: &Trajectory) -> Result<QPolygon> {
    let (TrajectoryStart::Zero { index: ia, angle: psi_a }, TrajectoryStart::Zero { index: ib, angle: psi_b }) =
        (a.start, b.start)
    else {
        return Err(Error::Invalid("polygon sides must start at a zero".into()));
    };
    if ia != ib {
        return Err(Error::Invalid(format!("sides start at zeros {ia} and {ib}")));
    }
    let (Some(theta_a), Some(theta_b)) = (a.end.infinity_angle(), b.end.infinity_angle()) else {
        return Err(Error::Invalid("polygon sides must escape to infinity".into()));
    };
    let d = qd.half_degree();
    let radius = a
        .points
        .iter()
        .chain(&b.points)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        * 1.5;
    let mut ring: Vec<C64> = a.points.clone();
    let sweep = ccw_opening(theta_a, theta_b);
    let start = ring.last().expect("nonempty").arg();
    let steps = 64;
    ring.push(C64::from_polar(radius, start));
    let end = b.points.last().expect("nonempty").arg();
    let total = ccw_opening(start, end);
    for k in 1..steps {
        ring.push(C64::from_polar(radius, start + total * k as f64 / steps as f64));
    }
    ring.push(C64::from_polar(radius, end));
    ring.extend(b.points.iter().rev());
    let interior_orders = qd
        .zeros
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ia)
        .filter(|(_, z)| winding_number(&ring, z.location) != 0)
        .map(|(_, z)| z.multiplicity as i64)
        .collect();
    let zero = &qd.zeros[ia];
    Ok(QPolygon {
        vertices: vec![
            PolygonVertex {
                label: format!("z{ia}"),
                order: zero.multiplicity as i64,
                angle: ccw_opening(psi_a, psi_b),
            },
            PolygonVertex {
                label: "inf".into(),
                order: QPolygon::infinity_order(d),
                angle: sweep,
            },
        ],
        interior_orders,
    })
}

/// Counterclockwise opening from direction `from` to direction `to`, in `(0, 2 pi]`.
pub fn ccw_opening(from: f64, to: f64) -> f64 {
    let r = (to - from).rem_euclid(2.0 * PI);
    if r == 0.0 {
        2.0 * PI
    } else {
        r
    }
}
