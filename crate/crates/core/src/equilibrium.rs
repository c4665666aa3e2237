//! Equilibrium measure on a critical trajectory and numerical checks of the
//! conditions that characterise it.
//!
//! On a horizontal arc starting at a zero, `t = D(z)` is real and increasing,
//! and `dmu = dt`: the measure is uniform in `t`. Everything here is computed
//! in that parametrisation, with `t = g(u)` graded towards zeros of `Q` so that
//! `z(u)` is smooth.
//!
//! These are verifications of necessary conditions, not a proof that the arc
//! is an S-curve.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::C64;
use crate::potential::Potential;
use crate::quadrature::{gauss_legendre, integrate_adaptive, EndpointGrading};
use crate::quaddiff::{
    chord_integral, d_from_zero, point_polyline_distance, Endpoint, QuadraticDifferential, Trajectory,
    TrajectoryKind, TrajectoryStart,
};

const I: C64 = C64::new(0.0, 1.0);
const ADAPTIVE_TOL: f64 = 1e-11;

/// End of an arc piece at a zero of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PieceEnd {
    pub zero_index: usize,
    pub location: C64,
    pub multiplicity: usize,
}

impl PieceEnd {
    /// Grading exponent making `z(u)` smooth: `t - t_e ~ (z - z_e)^{(m+2)/2}`.
    fn grading(&self) -> u32 {
        let k = self.multiplicity as u32 + 2;
        if k % 2 == 0 {
            k / 2
        } else {
            k
        }
    }
}

/// One zero-to-zero trajectory with `t` increasing along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcPiece {
    pub points: Vec<C64>,
    pub t: Vec<f64>,
    /// `Q^{1/2}` with `dt/dz = w / (pi i)`; zero at the endpoints.
    pub branch: Vec<C64>,
    pub start: PieceEnd,
    pub end: PieceEnd,
}

impl ArcPiece {
    fn t0(&self) -> f64 {
        self.t[0]
    }

    fn t1(&self) -> f64 {
        *self.t.last().expect("nonempty")
    }

    fn grading(&self) -> EndpointGrading {
        EndpointGrading::new(self.start.grading(), self.end.grading())
    }

    fn param(&self, piece: usize, u: f64) -> ArcParam {
        let (g, rest, dg) = self.grading().map_split(u);
        let span = self.t1() - self.t0();
        ArcParam {
            piece,
            t: self.t0() + span * g,
            dt: span * dg,
            from_start: span * g,
            to_end: span * rest,
        }
    }

    fn u_of_t(&self, t: f64) -> f64 {
        self.grading().inverse((t - self.t0()) / (self.t1() - self.t0()))
    }
}

/// A point of the arc by piece and `t`, with the offsets from both piece
/// ends kept as computed rather than recovered as differences of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ArcParam {
    piece: usize,
    t: f64,
    /// `dt/du` for points produced by the graded map.
    dt: f64,
    from_start: f64,
    to_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub arclength: f64,
    pub z: C64,
    /// `dmu/ds`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcMeasure {
    qd: QuadraticDifferential,
    pieces: Vec<ArcPiece>,
    mass: f64,
    samples: Vec<DensitySample>,
}

/// Unit tangents from the derivative of the local Lagrange interpolant in
/// chord length: five points in the interior, three next to the ends.
fn stencil_tangents(points: &[C64]) -> Vec<Option<C64>> {
    let n = points.len();
    let mut s = vec![0.0; n];
    for k in 1..n {
        s[k] = s[k - 1] + (points[k] - points[k - 1]).norm();
    }
    let mut out = vec![None; n];
    for k in 1..n.saturating_sub(1) {
        let half = if k >= 2 && k + 2 < n { 2 } else { 1 };
        let nodes = (k - half)..=(k + half);
        if nodes.clone().zip(nodes.clone().skip(1)).any(|(a, b)| s[b] <= s[a]) {
            continue;
        }
        let mut d = C64::new(0.0, 0.0);
        for j in nodes.clone() {
            let weight = if j == k {
                nodes.clone().filter(|&m| m != k).map(|m| 1.0 / (s[k] - s[m])).sum::<f64>()
            } else {
                let num: f64 = nodes.clone().filter(|&m| m != j && m != k).map(|m| s[k] - s[m]).product();
                let den: f64 = nodes.clone().filter(|&m| m != j).map(|m| s[j] - s[m]).product();
                num / den
            };
            d += points[j] * weight;
        }
        if d.norm() > 0.0 {
            out[k] = Some(d / d.norm());
        }
    }
    out
}

fn piece_end(qd: &QuadraticDifferential, index: usize) -> PieceEnd {
    let zero = qd.zeros()[index];
    PieceEnd {
        zero_index: index,
        location: zero.location,
        multiplicity: zero.multiplicity,
    }
}

/// Build the measure `(1/(pi i)) Q^{1/2} ds` on a chain of horizontal
/// zero-to-zero trajectories.
pub fn density_from_q(qd: &QuadraticDifferential, arcs: &[Trajectory]) -> Result<ArcMeasure> {
    if arcs.is_empty() {
        return Err(Error::Invalid("no arc pieces".into()));
    }
    let mut pieces = Vec::with_capacity(arcs.len());
    let mut offset = 0.0;
    let mut previous_end: Option<usize> = None;
    for arc in arcs {
        if arc.kind != TrajectoryKind::Horizontal {
            return Err(Error::BranchArcMismatch("arc pieces must be horizontal trajectories".into()));
        }
        let start = match arc.start {
            TrajectoryStart::Zero { index, .. } => index,
            TrajectoryStart::Point(_) => {
                return Err(Error::BranchArcMismatch("arc piece does not start at a zero".into()))
            }
        };
        let end = match arc.end {
            Endpoint::ZeroHit { index, .. } => index,
            ref other => {
                return Err(Error::BranchArcMismatch(format!("arc piece does not end at a zero: {other:?}")))
            }
        };
        if let Some(p) = previous_end {
            if p != start {
                return Err(Error::BranchArcMismatch(format!(
                    "piece starts at zero {start} but the previous one ended at {p}"
                )));
            }
        }
        previous_end = Some(end);
        let total = arc.d_values.last().expect("nonempty").re;
        let sign = if total >= 0.0 { 1.0 } else { -1.0 };
        let t: Vec<f64> = arc.d_values.iter().map(|d| offset + sign * d.re).collect();
        let branch: Vec<C64> = arc.branch.iter().map(|w| w * sign).collect();
        if t.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            return Err(Error::BranchArcMismatch("Re D is not monotone along the arc".into()));
        }
        offset = *t.last().expect("nonempty");
        pieces.push(ArcPiece {
            points: arc.points.clone(),
            t,
            branch,
            start: piece_end(qd, start),
            end: piece_end(qd, end),
        });
    }

    let mut samples = Vec::new();
    let mut s_acc = 0.0;
    for piece in &pieces {
        let tangents = stencil_tangents(&piece.points);
        // |λ| = |w|/π on a unit tangent; imaginary noise is judged against the piece scale
        let scale = piece.branch.iter().map(|w| w.norm()).fold(0.0, f64::max) / PI;
        for (k, &z) in piece.points.iter().enumerate() {
            if k > 0 {
                s_acc += (z - piece.points[k - 1]).norm();
            }
            if k == 0 && !samples.is_empty() {
                continue;
            }
            let density = match tangents[k] {
                Some(tau) if piece.branch[k].norm() > 0.0 => {
                    let lambda = piece.branch[k] * tau / (PI * I);
                    if lambda.im.abs() > 1e-6 * scale {
                        return Err(Error::BranchArcMismatch(format!(
                            "density {lambda} at {z} is not real"
                        )));
                    }
                    if lambda.re < -1e-9 {
                        return Err(Error::BranchArcMismatch(format!("negative density {} at {z}", lambda.re)));
                    }
                    lambda.re
                }
                _ => 0.0,
            };
            samples.push(DensitySample {
                arclength: s_acc,
                z,
                density,
            });
        }
    }
    Ok(ArcMeasure {
        qd: qd.clone(),
        pieces,
        mass: offset,
        samples,
    })
}

impl ArcMeasure {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn pieces(&self) -> &[ArcPiece] {
        &self.pieces
    }

    pub fn samples(&self) -> &[DensitySample] {
        &self.samples
    }

    pub fn qd(&self) -> &QuadraticDifferential {
        &self.qd
    }

    /// All vertices in order, shared piece ends listed once.
    pub fn polyline(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for p in &self.pieces {
            let skip = usize::from(!out.is_empty());
            out.extend(p.points.iter().skip(skip));
        }
        out
    }

    /// Mass by arclength quadrature of the sampled density (trapezoid on the
    /// vertices), independent of the `D` values.
    pub fn mass_by_arclength(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[0].density + w[1].density) * (w[1].arclength - w[0].arclength))
            .sum()
    }

    /// Least-squares exponent of `density ~ s^alpha` near each end, fitted on
    /// arclength distances in `[lo, hi]` from the endpoint.
    pub fn endpoint_exponents(&self, lo: f64, hi: f64) -> (f64, f64) {
        let total = self.samples.last().map(|s| s.arclength).unwrap_or(0.0);
        let fit = |pairs: Vec<(f64, f64)>| {
            let n = pairs.len() as f64;
            if n < 2.0 {
                return f64::NAN;
            }
            let (sx, sy) = pairs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
            let (mx, my) = (sx / n, sy / n);
            let (mut num, mut den) = (0.0, 0.0);
            for (x, y) in &pairs {
                num += (x - mx) * (y - my);
                den += (x - mx) * (x - mx);
            }
            num / den
        };
        let pick = |from_end: bool| {
            self.samples
                .iter()
                .filter_map(|s| {
                    let dist = if from_end { total - s.arclength } else { s.arclength };
                    (dist >= lo && dist <= hi && s.density > 0.0).then(|| (dist.ln(), s.density.ln()))
                })
                .collect::<Vec<_>>()
        };
        (fit(pick(false)), fit(pick(true)))
    }

    fn piece_for_t(&self, t: f64) -> usize {
        self.pieces
            .iter()
            .position(|p| t <= p.t1())
            .unwrap_or(self.pieces.len() - 1)
    }

    /// `D` at `z`, computed from vertex `k` of `piece` (or from a zero end).
    fn d_near(&self, piece: &ArcPiece, k: usize, z: C64, w_z: C64) -> C64 {
        let last = piece.points.len() - 1;
        if k == 0 {
            return piece.t0() + d_from_zero(&self.qd, piece.start.location, z, w_z, 4);
        }
        if k + 1 >= last {
            return piece.t1() + d_from_zero(&self.qd, piece.end.location, z, w_z, 4);
        }
        let (dd, _) = chord_integral(&self.qd, piece.points[k], z, piece.branch[k], 1, 16);
        piece.t[k] + dd
    }

    fn branch_ref(piece: &ArcPiece, k: usize) -> C64 {
        let n = piece.branch.len();
        let k = k.min(n - 1);
        if piece.branch[k].norm() > 0.0 {
            piece.branch[k]
        } else if k + 1 < n && piece.branch[k + 1].norm() > 0.0 {
            piece.branch[k + 1]
        } else {
            piece.branch[k.saturating_sub(1)]
        }
    }

    /// Local inversion of `t - t_e = (2c/((m+2) pi i)) (z - z_e)^{(m+2)/2}`,
    /// choosing the root pointing towards `toward`.
    fn expansion_guess(&self, end: &PieceEnd, dt: f64, toward: C64) -> C64 {
        let m = end.multiplicity;
        let mut fact = 1.0;
        for k in 2..=m {
            fact *= k as f64;
        }
        let qm = self
            .qd
            .poly()
            .nth_derivative(m)
            .map(|p| p.eval(end.location))
            .unwrap_or(C64::new(1.0, 0.0));
        let c = (qm / fact).sqrt();
        let k = (m + 2) as f64;
        let x = I * (k * PI * dt) / (2.0 * c);
        let dir = (toward - end.location).arg();
        let r = x.norm().powf(2.0 / k);
        (0..m + 2)
            .map(|j| end.location + C64::from_polar(r, 2.0 * (x.arg() + 2.0 * PI * j as f64) / k))
            .min_by(|a, b| {
                let da = crate::quaddiff::wrap_angle((a - end.location).arg() - dir).abs();
                let db = crate::quaddiff::wrap_angle((b - end.location).arg() - dir).abs();
                da.total_cmp(&db)
            })
            .expect("m+2 >= 3 roots")
    }

    fn param_at(&self, t: f64) -> ArcParam {
        let piece = self.piece_for_t(t);
        let p = &self.pieces[piece];
        let t = t.clamp(p.t0(), p.t1());
        ArcParam {
            piece,
            t,
            dt: 1.0,
            from_start: t - p.t0(),
            to_end: p.t1() - t,
        }
    }

    /// The point of the arc with `D = t`, for `0 <= t <= mass`.
    pub fn point_at(&self, t: f64) -> C64 {
        self.locate(&self.param_at(t))
    }

    fn locate(&self, at: &ArcParam) -> C64 {
        let piece = &self.pieces[at.piece];
        let t = at.t;
        if at.from_start <= 0.0 {
            return piece.start.location;
        }
        if at.to_end <= 0.0 {
            return piece.end.location;
        }
        let k = match piece.t.partition_point(|&x| x <= t) {
            0 => 0,
            p => p - 1,
        };
        let last = piece.points.len() - 1;
        let k = k.min(last - 1);
        let (mut z, target) = if k == 0 {
            (self.expansion_guess(&piece.start, at.from_start, piece.points[1]), at.from_start)
        } else if k + 1 >= last {
            (self.expansion_guess(&piece.end, -at.to_end, piece.points[last - 1]), -at.to_end)
        } else {
            // cubic Hermite in t with dz/dt = pi i / w
            let (t0, t1) = (piece.t[k], piece.t[k + 1]);
            let h = t1 - t0;
            let s = (t - t0) / h;
            let (z0, z1) = (piece.points[k], piece.points[k + 1]);
            let d0 = PI * I / piece.branch[k] * h;
            let d1 = PI * I / piece.branch[k + 1] * h;
            let (s2, s3) = (s * s, s * s * s);
            let guess = z0 * (2.0 * s3 - 3.0 * s2 + 1.0) + d0 * (s3 - 2.0 * s2 + s) + z1 * (-2.0 * s3 + 3.0 * s2) + d1 * (s3 - s2);
            (guess, t)
        };
        let mut w_ref = Self::branch_ref(piece, k);
        for _ in 0..12 {
            let w = self.qd.sqrt_near(z, w_ref);
            let d = self.d_local(piece, k, z, w);
            let err = d - target;
            if err.norm() <= 1e-15 * (target.abs() + if k == 0 || k + 1 >= last { 0.0 } else { 1.0 }) {
                break;
            }
            if w.norm() == 0.0 {
                break;
            }
            z -= err * PI * I / w;
            w_ref = w;
        }
        z
    }

    /// `D` relative to the nearest anchor: the start zero for `k = 0`, the
    /// end zero next to the last vertex, otherwise absolute.
    fn d_local(&self, piece: &ArcPiece, k: usize, z: C64, w_z: C64) -> C64 {
        let last = piece.points.len() - 1;
        if k == 0 {
            return d_from_zero(&self.qd, piece.start.location, z, w_z, 4);
        }
        if k + 1 >= last {
            return d_from_zero(&self.qd, piece.end.location, z, w_z, 4);
        }
        self.d_near(piece, k, z, w_z)
    }

    /// `D` at a point near the arc, by nearest-vertex continuation; returns
    /// `(distance to the polyline, t)` with `t` clamped to `[0, mass]`.
    pub fn project(&self, z: C64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0usize);
        for (pi, p) in self.pieces.iter().enumerate() {
            let (d, frac) = point_polyline_distance(z, &p.points);
            if d < best.0 {
                best = (d, frac, pi);
            }
        }
        let (dist, frac, pi) = best;
        let piece = &self.pieces[pi];
        let k = (frac.floor() as usize).min(piece.points.len() - 2);
        let a = piece.points[k];
        let b = piece.points[k + 1];
        let foot = a + (b - a) * (frac - k as f64);
        let w = self.qd.sqrt_near(foot, Self::branch_ref(piece, k));
        let t = self.d_near(piece, k, foot, w).re;
        (dist, t.clamp(0.0, self.mass))
    }

    /// `\int f dmu` with `panels` graded panels of 16 points per piece.
    pub fn integrate<F: FnMut(C64) -> f64>(&self, mut f: F, panels: usize) -> f64 {
        let rule = gauss_legendre(16);
        let mut total = 0.0;
        for (idx, piece) in self.pieces.iter().enumerate() {
            for p in 0..panels {
                let lo = p as f64 / panels as f64;
                let hi = (p + 1) as f64 / panels as f64;
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    let at = piece.param(idx, lo + 0.5 * (hi - lo) * (x + 1.0));
                    total += 0.5 * (hi - lo) * w * at.dt * f(self.locate(&at));
                }
            }
        }
        total
    }

    /// `U(z) = \int log(1/|z - s|) dmu(s)` for `z` off the arc.
    pub fn log_potential_off(&self, z: C64) -> f64 {
        let mut total = 0.0;
        for (idx, piece) in self.pieces.iter().enumerate() {
            total += integrate_adaptive(
                |u| {
                    let at = piece.param(idx, u);
                    let d = (z - self.locate(&at)).norm();
                    if d == 0.0 {
                        0.0
                    } else {
                        d.ln() * at.dt
                    }
                },
                0.0,
                1.0,
                ADAPTIVE_TOL,
            );
        }
        -total
    }

    /// `\int log|z(t0) - z(t)| g(t) dt` for an interior arc point, written as
    /// `\int [log|R| g + log|t0 - t| (g - g(t0))] dt + g(t0) \int log|t0 - t| dt`
    /// with `R = (z(t0) - z(t)) / (t0 - t)`; the last integral is exact.
    fn log_integral_on<G: Fn(C64, &ArcParam) -> f64>(&self, at0: &ArcParam, g: &G) -> f64 {
        let m = self.mass;
        let t0 = at0.t;
        let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
        let z0 = self.locate(at0);
        let g0 = g(z0, at0);
        let singular = g0 * (xlogx(t0) + xlogx(m - t0) - m);
        let pi0 = at0.piece;
        let deriv = {
            let piece = &self.pieces[pi0];
            let k = piece.t.partition_point(|&x| x <= t0).saturating_sub(1);
            let w = self.qd.sqrt_near(z0, Self::branch_ref(piece, k));
            PI / w.norm()
        };
        let cutoff = 1e-9_f64.min(1e-3 * t0.min(m - t0));
        let mut regular = 0.0;
        for (idx, piece) in self.pieces.iter().enumerate() {
            let f = |u: f64| {
                let at = piece.param(idx, u);
                let dt = at.dt;
                let gap = t0 - at.t;
                let z = self.locate(&at);
                let gt = g(z, &at);
                let r = if gap.abs() <= cutoff {
                    deriv
                } else {
                    (z0 - z).norm() / gap.abs()
                };
                let log_r = if r > 0.0 && r.is_finite() { r.ln() } else { 0.0 };
                let log_gap = if gap == 0.0 { 0.0 } else { gap.abs().ln() };
                (log_r * gt + log_gap * (gt - g0)) * dt
            };
            regular += if idx == pi0 && t0 > piece.t0() && t0 < piece.t1() {
                let u0 = piece.u_of_t(t0);
                integrate_adaptive(f, 0.0, u0, ADAPTIVE_TOL) + integrate_adaptive(f, u0, 1.0, ADAPTIVE_TOL)
            } else {
                integrate_adaptive(f, 0.0, 1.0, ADAPTIVE_TOL)
            };
        }
        singular + regular
    }

    /// `ds/dt = pi / |Q^{1/2}|` at the arc point `z`. Close to a zero it is
    /// taken from the local expansion in `t`, where `z - z_e` has lost digits.
    fn arclength_density(&self, z: C64, at: &ArcParam) -> f64 {
        let piece = &self.pieces[at.piece];
        let near = [(piece.start, at.from_start), (piece.end, at.to_end)];
        for (end, tau) in near {
            if tau < 1e-6 * self.mass {
                let m = end.multiplicity;
                let mut fact = 1.0;
                for k in 2..=m {
                    fact *= k as f64;
                }
                let c = self
                    .qd
                    .poly()
                    .nth_derivative(m)
                    .map(|p| p.eval(end.location).norm() / fact)
                    .unwrap_or(1.0)
                    .sqrt();
                // |t - t_e| = 2c r^{(m+2)/2} / ((m+2) pi),  |w| = c r^{m/2}
                let k = (m + 2) as f64;
                let r = (k * PI * tau.max(0.0) / (2.0 * c)).powf(2.0 / k);
                let w = c * r.powf(m as f64 / 2.0);
                return if w > 0.0 { PI / w } else { 0.0 };
            }
        }
        let w = self.qd.eval(z).sqrt().norm();
        if w > 0.0 {
            PI / w
        } else {
            0.0
        }
    }

    /// `U(z(t0))` for an interior point of the arc.
    pub fn log_potential_on(&self, t0: f64) -> f64 {
        -self.log_integral_on(&self.param_at(t0), &|_, _| 1.0)
    }

    /// `(\iint log(1/|s - t|) dnu dnu, \int f dnu)` for `nu = g(t) dt / \int g dt`.
    fn weighted_energy<G: Fn(C64, &ArcParam) -> f64, F: Fn(C64) -> f64>(&self, g: &G, f: &F, panels: usize) -> (f64, f64) {
        let rule = gauss_legendre(16);
        let mut norm = 0.0;
        let mut energy = 0.0;
        let mut field = 0.0;
        for (idx, piece) in self.pieces.iter().enumerate() {
            for p in 0..panels {
                let lo = p as f64 / panels as f64;
                let hi = (p + 1) as f64 / panels as f64;
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    let at = piece.param(idx, lo + 0.5 * (hi - lo) * (x + 1.0));
                    let z = self.locate(&at);
                    let weight = 0.5 * (hi - lo) * w * at.dt * g(z, &at);
                    norm += weight;
                    field += weight * f(z);
                    energy -= weight * self.log_integral_on(&at, g);
                }
            }
        }
        (energy / (norm * norm), field / norm)
    }
}

/// `U^mu(z)`. Points within `1e-9` of the interior of the arc use the on-arc
/// formula; everything else (including the endpoints) direct adaptive quadrature.
pub fn log_potential(measure: &ArcMeasure, z: C64) -> f64 {
    let (dist, t) = measure.project(z);
    let m = measure.mass();
    if dist < 1e-9 && t > 1e-6 * m && t < (1.0 - 1e-6) * m {
        measure.log_potential_on(t)
    } else {
        measure.log_potential_off(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    /// Mean of `2U + Re V` over interior arc samples.
    pub ell: f64,
    /// `max |2U + Re V - ell|` over arc samples.
    pub on_support_deviation: f64,
    /// `min (2U + Re V - ell)` over tail samples.
    pub off_support_margin: f64,
    /// `2U + Re V` increases along every tail.
    pub tails_increasing: bool,
    pub arc_samples: usize,
    pub tail_samples: usize,
}

/// Interior sample positions `t_k = mass (k + 1/2) / n`.
fn interior_ts(mass: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| mass * (k as f64 + 0.5) / n as f64).collect()
}

/// Every `stride`-th vertex of each tail, plus the last, restricted to `|z| <= radius`.
fn tail_samples(tail: &Trajectory, count: usize, radius: f64) -> Vec<C64> {
    let pts: Vec<C64> = tail.points.iter().copied().filter(|z| z.norm() <= radius).collect();
    if pts.is_empty() {
        return pts;
    }
    let stride = (pts.len() / count).max(1);
    let mut out: Vec<C64> = pts.iter().copied().step_by(stride).collect();
    if out.last() != pts.last() {
        out.push(*pts.last().expect("nonempty"));
    }
    out
}

pub fn variational_check(measure: &ArcMeasure, pot: &Potential, tails: &[Trajectory]) -> VariationalReport {
    let arc_ts = interior_ts(measure.mass(), 100);
    let on: Vec<f64> = arc_ts
        .iter()
        .map(|&t| 2.0 * measure.log_potential_on(t) + pot.re_v(measure.point_at(t)))
        .collect();
    let ell = on.iter().sum::<f64>() / on.len() as f64;
    let on_support_deviation = on.iter().map(|v| (v - ell).abs()).fold(0.0, f64::max);
    let mut margin = f64::INFINITY;
    let mut increasing = true;
    let mut count = 0;
    for tail in tails {
        let radius = tail.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut previous = f64::NEG_INFINITY;
        for z in tail_samples(tail, 120, radius) {
            let value = 2.0 * log_potential(measure, z) + pot.re_v(z) - ell;
            margin = margin.min(value);
            if value < previous - 1e-9 {
                increasing = false;
            }
            previous = value;
            count += 1;
        }
    }
    VariationalReport {
        ell,
        on_support_deviation,
        off_support_margin: margin,
        tails_increasing: increasing,
        arc_samples: on.len(),
        tail_samples: count,
    }
}

/// `max |Re(Q^{1/2} tau)| / |Q^{1/2}|` over interior vertices of a polyline,
/// with `tau` the unit tangent. Zero exactly on horizontal trajectories.
pub fn s_property_residual_polyline(qd: &QuadraticDifferential, points: &[C64]) -> f64 {
    let tangents = stencil_tangents(points);
    let mut worst: f64 = 0.0;
    for (k, tau) in tangents.iter().enumerate() {
        let Some(tau) = tau else { continue };
        let w = qd.eval(points[k]).sqrt();
        if w.norm() == 0.0 {
            continue;
        }
        worst = worst.max((w * tau).re.abs() / w.norm());
    }
    worst
}

pub fn s_property_residual(qd: &QuadraticDifferential, measure: &ArcMeasure) -> f64 {
    measure
        .pieces()
        .iter()
        .map(|p| s_property_residual_polyline(qd, &p.points))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `\iint log(1/|s-t|) dmu dmu`.
    pub logarithmic_energy: f64,
    /// `\int Re V dmu`.
    pub field_term: f64,
    /// `E_V = logarithmic energy + field term`.
    pub energy: f64,
    pub ell: f64,
    /// `|ell - (2 E_V - \int Re V dmu)|`.
    pub consistency_gap: f64,
    /// `E_V` of the arclength-uniform probability measure on the same arc.
    pub uniform_energy: f64,
    /// `|E_V(N panels) - E_V(2N panels)|`.
    pub resolution_gap: f64,
    pub panels: usize,
}

pub fn energy(measure: &ArcMeasure, pot: &Potential, ell: f64) -> EnergyReport {
    let panels = 8;
    let re_v = |z: C64| pot.re_v(z);
    let unit = |_: C64, _: &ArcParam| 1.0;
    let (coarse_log, coarse_field) = measure.weighted_energy(&unit, &re_v, panels);
    let (fine_log, field_term) = measure.weighted_energy(&unit, &re_v, 2 * panels);
    let coarse = coarse_log + coarse_field;
    let fine = fine_log + field_term;
    // arclength-uniform: density in t is ds/dt = pi/|w|
    let weight = |z: C64, at: &ArcParam| measure.arclength_density(z, at);
    let (uniform_log, uniform_field) = measure.weighted_energy(&weight, &re_v, panels);
    EnergyReport {
        logarithmic_energy: fine_log,
        field_term,
        energy: fine,
        ell,
        consistency_gap: (ell - (2.0 * fine - field_term)).abs(),
        uniform_energy: uniform_log + uniform_field,
        resolution_gap: (fine - coarse).abs(),
        panels: 2 * panels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic;
    use crate::quaddiff::{connection_search, Connection, TraceOptions};

    fn cubic_measure(k: f64) -> ArcMeasure {
        let p = cubic::params_from_k(k).unwrap();
        let qd = cubic::build_q(&p).unwrap();
        let arc = match connection_search(&qd, cubic::LEFT_ZERO, cubic::RIGHT_ZERO, &TraceOptions::default()).unwrap() {
            Connection::Found(t) => t,
            Connection::NotFound(e) => panic!("{e:?}"),
        };
        density_from_q(&qd, &[arc]).unwrap()
    }

    #[test]
    fn unit_mass_two_ways() {
        let m = cubic_measure(0.0);
        assert!((m.mass() - 1.0).abs() < 1e-6, "{}", m.mass());
        assert!((m.mass_by_arclength() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn point_at_inverts_d() {
        let m = cubic_measure(0.0);
        for t in [1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let z = m.point_at(t);
            let (dist, back) = m.project(z);
            assert!(dist < 1e-6, "{t}: {dist}");
            assert!((back - t).abs() < 1e-6, "{t}: {back}");
        }
        let mid = m.point_at(0.5 * m.mass());
        assert!(mid.re.abs() < 1e-10);
    }

    #[test]
    fn far_field_of_unit_mass() {
        let m = cubic_measure(0.0);
        let z = C64::new(1e6, 3e5);
        assert!((log_potential(&m, z) + z.norm().ln()).abs() < 1e-5);
    }

    #[test]
    fn potential_is_reflection_symmetric() {
        let m = cubic_measure(0.0);
        for z in [C64::new(0.3, 2.0), C64::new(-1.7, -0.4)] {
            let a = log_potential(&m, z);
            let b = log_potential(&m, -z.conj());
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn density_vanishes_like_square_root() {
        let m = cubic_measure(0.0);
        let (a, b) = m.endpoint_exponents(3e-4, 3e-2);
        assert!((a - 0.5).abs() < 0.1 && (b - 0.5).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn perturbed_arc_breaks_s_property() {
        let m = cubic_measure(0.0);
        let qd = m.qd().clone();
        assert!(s_property_residual(&qd, &m) < 1e-6);
        let pts = m.polyline();
        let mid = pts[pts.len() / 2];
        let bumped: Vec<C64> = pts
            .iter()
            .map(|&z| z + I * 0.05 * (-((z - mid).norm() / 0.3).powi(2)).exp())
            .collect();
        assert!(s_property_residual_polyline(&qd, &bumped) > 1e-3);
    }
}
