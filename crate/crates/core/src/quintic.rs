//! The quintic potential `V(z) = -i z^5/5`.
//!
//! The ansatz is `Q = -(z-z1)(z-z2)(z-z0)^2(z-z3)^2(z-z4)^2 / 4` with
//! `z0 = -ai`, `z1,2 = ∓b + ci`, `z3,4 = ∓d + ei`, and `Q = -z^8/4 + i z^3 + O(z^2)`.
//! Two real parameter sets exist, labelled `p = 1` (`c > 0`) and `p = 2` (`c < 0`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, RealPoly, C64};
use crate::potential::ContourClass;
use crate::quadrature::integrate;
use crate::quaddiff::{emanation_angles, QuadraticDifferential, TrajectoryKind, Zero};
use crate::resultant::{relative_resultant, sylvester_resultant};
use crate::roots::{raw_roots, real_root_in_interval, real_roots};

/// Which of the two parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    First,
    Second,
}

impl Branch {
    pub fn from_index(p: u8) -> Result<Self> {
        match p {
            1 => Ok(Branch::First),
            2 => Ok(Branch::Second),
            _ => Err(Error::Invalid(format!("parameter set must be 1 or 2, got {p}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Branch::First => 1,
            Branch::Second => 2,
        }
    }

    /// `+1` for the first set, `-1` for the second.
    fn sign(self) -> f64 {
        match self {
            Branch::First => 1.0,
            Branch::Second => -1.0,
        }
    }

    /// Contour class whose S-curve is built from this `Q`.
    pub fn contour_class(self) -> ContourClass {
        match self {
            Branch::First => ContourClass::new(3, 1),
            Branch::Second => ContourClass::new(4, 5),
        }
    }

    pub fn from_class(class: ContourClass) -> Result<Self> {
        match (class.from, class.to) {
            (3, 1) => Ok(Branch::First),
            (4, 5) => Ok(Branch::Second),
            _ => Err(Error::Invalid(format!("no quintic S-curve for class {class}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuinticParams {
    pub branch: Branch,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    /// Auxiliary radicals of the closed form (`NaN` when solved numerically).
    pub big_a: f64,
    pub big_b: f64,
}

/// Zero indices of [`build_q`].
pub const LEFT_ZERO: usize = 0;
pub const RIGHT_ZERO: usize = 1;
pub const AXIS_ZERO: usize = 2;
pub const LEFT_DOUBLE_ZERO: usize = 3;
pub const RIGHT_DOUBLE_ZERO: usize = 4;

impl QuinticParams {
    /// `[z1, z2, z0, z3, z4]`.
    pub fn zeros(&self) -> [C64; 5] {
        [
            C64::new(-self.b, self.c),
            C64::new(self.b, self.c),
            C64::new(0.0, -self.a),
            C64::new(-self.d, self.e),
            C64::new(self.d, self.e),
        ]
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    pub fn sys1_residuals(&self) -> [f64; 4] {
        sys1(self.a, self.b, self.c, self.d)
    }

    pub fn sys2_residuals(&self) -> [f64; 2] {
        let (f, g) = sys2_in_a(self.c);
        let a = C64::new(self.a, 0.0);
        [f.eval(a).norm(), g.eval(a).norm()]
    }
}

/// The four coefficient equations (degrees 6 down to 3) after eliminating `e`.
pub fn sys1(a: f64, b: f64, c: f64, d: f64) -> [f64; 4] {
    let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
    let (a3, c3) = (a2 * a, c2 * c);
    let (a4, c4, d4) = (a2 * a2, c2 * c2, d2 * d2);
    let (a5, c5) = (a4 * a, c4 * c);
    let r1 = -3.0 * a2 + 2.0 * a * c + 2.0 * b2 - 3.0 * c2 + 4.0 * d2;
    let r2 = -a * c2 + a2 * c + 4.0 * b2 * c + 4.0 * a * d2 - 4.0 * c * d2 + a3 - c3;
    let r3 = -16.0 * a * b2 * c + 16.0 * a * c * d2 - 38.0 * a2 * c2 + 20.0 * a3 * c + 24.0 * a2 * b2 + 20.0 * a * c3
        + 24.0 * a2 * d2
        - 9.0 * a4
        - 9.0 * c4
        - 16.0 * d4
        - 32.0 * b2 * d2
        - 24.0 * b2 * c2
        + 24.0 * c2 * d2;
    let r4 = -32.0 + 2.0 * a2 * c3 + 3.0 * a5 + 20.0 * a2 * b2 * c - 24.0 * a2 * c * d2 + a4 * c - 16.0 * b2 * c * d2
        + 8.0 * a3 * d2
        + 16.0 * c * d4
        - 3.0 * c5
        - 8.0 * c3 * d2
        - 4.0 * a3 * b2
        - 16.0 * a * d4
        - a * c4
        - 4.0 * b2 * c3
        - 2.0 * a3 * c2
        - 12.0 * a * b2 * c2
        + 24.0 * a * c2 * d2
        - 16.0 * a * b2 * d2;
    [r1.abs(), r2.abs(), r3.abs(), r4.abs()]
}

/// `(b^2, d^2)` in terms of `a` and `c`.
pub fn bd_squared(a: f64, c: f64) -> Result<(f64, f64)> {
    let den = 3.0 * c - a;
    if den == 0.0 {
        return Err(Error::Inconsistent(format!("3c - a vanishes at a = {a}, c = {c}")));
    }
    let b2 = 2.0 * (c - a) * (a * a + c * c) / den;
    let d2 = (7.0 * a * a * c - 5.0 * a * c * c + a * a * a + 5.0 * c * c * c) / (4.0 * den);
    Ok((b2, d2))
}

/// The reduced two-equation system as polynomials in `a` with `c` fixed.
pub fn sys2_in_a(c: f64) -> (CplxPoly, CplxPoly) {
    let p = |k: i32| c.powi(k);
    let f = [
        -15.0 * p(6),
        30.0 * p(5),
        -37.0 * p(4),
        36.0 * p(3),
        -3.0 * p(2),
        -6.0 * c,
        3.0,
    ];
    let g = [
        -9.0 * p(2) - 3.0 * p(7),
        6.0 * c + 2.0 * p(6),
        -1.0 + p(5),
        -4.0 * p(4),
        7.0 * p(3),
        -6.0 * p(2),
        3.0 * c,
    ];
    (
        CplxPoly::from_real(&f).expect("leading 3"),
        CplxPoly::from_real(&g).unwrap_or_else(|_| CplxPoly::from_real(&[1.0]).expect("constant")),
    )
}

/// Resultant in `a` of the reduced system, as a function of `c`.
pub fn resultant_in_a(c: f64) -> Result<C64> {
    let (f, g) = sys2_in_a(c);
    if g.degree() < 6 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    sylvester_resultant(&f, &g)
}

/// `|Res| / Hadamard bound` at `c`.
pub fn relative_resultant_in_a(c: f64) -> Result<f64> {
    let (f, g) = sys2_in_a(c);
    if g.degree() < 6 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    relative_resultant(&f, &g)
}

/// `28 c^10 + 108 c^5 - 3`.
pub fn c_polynomial() -> RealPoly {
    let mut v = vec![0.0; 11];
    v[0] = -3.0;
    v[5] = 108.0;
    v[10] = 28.0;
    RealPoly::new(v).expect("nonzero")
}

/// Parameters from the explicit radical expressions.
pub fn closed_form_params(branch: Branch) -> QuinticParams {
    let s30 = 30f64.sqrt();
    let sg = branch.sign();
    let m = 4.0 + sg * s30;
    let big_a = (62.0 + sg * 12.0 * s30 + (7740.0 + sg * 1410.0 * s30).sqrt()).cbrt();
    let big_b = (-sg * 1_037_232.0 + 192_080.0 * s30).powf(0.2);
    let c = match branch {
        Branch::First => ((-27.0 + 5.0 * s30) / 14.0).powf(0.2),
        Branch::Second => -((27.0 + 5.0 * s30) / 14.0).powf(0.2),
    };
    let a = c * (1.0 - big_a - m / big_a) / 3.0;
    let b = (36.0 + sg * 6.0 * s30).sqrt() * big_b / 42.0;
    let d = big_b / (28.0 * 3f64.sqrt()) * (big_a - m / big_a).abs();
    let e = c * (-big_a - m / big_a - 2.0) / 6.0;
    QuinticParams {
        branch,
        a,
        b,
        c,
        d,
        e,
        big_a,
        big_b,
    }
}

/// Parameters from a numeric pipeline: the real root `c` of the `c`-polynomial,
/// `a` as the real common root of the reduced system, then `b`, `d`, `e`.
pub fn solve_params_numeric(branch: Branch) -> Result<QuinticParams> {
    let cp = c_polynomial();
    let c = match branch {
        Branch::First => real_root_in_interval(&cp, 0.0, 1.0, 1e-16)?,
        Branch::Second => real_root_in_interval(&cp, -2.0, -1.0, 1e-16)?,
    };
    params_from_c(branch, c)
}

/// Complete the parameter set for a given `c`.
pub fn params_from_c(branch: Branch, c: f64) -> Result<QuinticParams> {
    if c == 0.0 {
        return Err(Error::Inconsistent(
            "c = 0 forces a = 0, which makes the coefficient equations inconsistent".into(),
        ));
    }
    let (f, g) = sys2_in_a(c);
    let scale_g = g.coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut candidates: Vec<(f64, f64)> = raw_roots(&f, 2000)?
        .into_iter()
        .filter(|r| r.im.abs() < 1e-6 * (1.0 + r.norm()))
        .map(|r| {
            let a = r.re;
            let gap = g.eval(C64::new(a, 0.0)).norm() / (scale_g * (1.0 + a.abs()).powi(6));
            (a, gap)
        })
        .filter(|(_, gap)| *gap < 1e-8)
        .collect();
    candidates.sort_by(|x, y| x.1.total_cmp(&y.1));
    let mut a = candidates
        .first()
        .map(|x| x.0)
        .ok_or_else(|| Error::Inconsistent(format!("reduced system has no real common root at c = {c}")))?;
    // polish on f alone: the common root is simple for f
    for _ in 0..3 {
        let (v, dv) = f.eval_with_derivative(C64::new(a, 0.0));
        if dv.norm() == 0.0 {
            break;
        }
        a -= (v / dv).re;
    }
    let (b2, d2) = bd_squared(a, c)?;
    if b2 <= 0.0 || d2 <= 0.0 {
        return Err(Error::Inconsistent(format!(
            "b^2 = {b2}, d^2 = {d2} at a = {a}, c = {c}; expected both positive"
        )));
    }
    let p = QuinticParams {
        branch,
        a,
        b: b2.sqrt(),
        c,
        d: d2.sqrt(),
        e: 0.5 * (a - c),
        big_a: f64::NAN,
        big_b: f64::NAN,
    };
    let worst = p.sys1_residuals().into_iter().fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::Inconsistent(format!("coefficient equations residual {worst:e}")));
    }
    Ok(p)
}

/// The cubic factor shared by both reduced equations, in `a`.
pub fn common_cubic_factor(branch: Branch, c: f64) -> CplxPoly {
    let s = branch.sign() * 30f64.sqrt();
    CplxPoly::from_real(&[
        (15.0 + 3.0 * s) * c * c * c,
        -(3.0 + s) * c * c,
        -3.0 * c,
        3.0,
    ])
    .expect("leading 3")
}

pub fn build_q(params: &QuinticParams) -> Result<QuadraticDifferential> {
    let [z1, z2, z0, z3, z4] = params.zeros();
    QuadraticDifferential::from_zeros(
        C64::new(-0.25, 0.0),
        vec![
            Zero { location: z1, multiplicity: 1 },
            Zero { location: z2, multiplicity: 1 },
            Zero { location: z0, multiplicity: 2 },
            Zero { location: z3, multiplicity: 2 },
            Zero { location: z4, multiplicity: 2 },
        ],
    )
}

/// Largest deviation of the coefficients of degree 3..=8 from `-z^8/4 + i z^3`.
pub fn expansion_error(qd: &QuadraticDifferential) -> f64 {
    let q = qd.poly();
    let mut worst = (q.coeff(8) - C64::new(-0.25, 0.0)).norm();
    for k in 4..8 {
        worst = worst.max(q.coeff(k).norm());
    }
    worst.max((q.coeff(3) - C64::new(0.0, 1.0)).norm())
}

/// `21c^2/4 + ac/2 - 3a^2/4 + d^2`, the linear coefficient in `Im D'` along the
/// line through the simple zeros.
pub fn segment_cubic_coefficient(p: &QuinticParams) -> f64 {
    21.0 / 4.0 * p.c * p.c + 0.5 * p.a * p.c - 0.75 * p.a * p.a + p.d * p.d
}

/// `D'(x + ic) / (1/2pi) = sqrt(x^2 - b^2) (x + i(c+a)) ((x + i(c-e))^2 - d^2)` without the root.
fn line_factor(p: &QuinticParams, x: f64) -> C64 {
    let lin = C64::new(x, p.c + p.a);
    let sq = C64::new(x, p.c - p.e);
    lin * (sq * sq - p.d * p.d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleGuards {
    pub branch: Branch,
    /// Horizontal emanation angles at the left simple zero, ascending.
    pub emanation_angles: Vec<f64>,
    /// The angle pointing into the triangle.
    pub inward_angle: f64,
    /// Coefficient `k` in `Im D'(x + ic) ∝ sqrt(b^2-x^2)(x^3 - k x)`.
    pub cubic_coefficient: f64,
    /// Minimum over the open segment of `Im D(x + ic)`, sign anchored at the midpoint.
    pub segment_min_im_d: f64,
    /// Sign used for the anchor (`+1` if the natural branch already gives positive values).
    pub segment_anchor: f64,
    /// Maximum of `Re Q` over the open tilted side.
    pub tilted_max_re_q: f64,
    /// Real roots of `Re Q` along the tilted line, ascending.
    pub tilted_real_roots: Vec<f64>,
    /// All roots of `Re Q` along the tilted line.
    pub tilted_roots: Vec<C64>,
    /// Triangle corners: left zero, right zero, apex.
    pub corners: [C64; 3],
}

impl TriangleGuards {
    pub fn holds(&self) -> bool {
        self.segment_min_im_d > 0.0 && self.tilted_max_re_q < 0.0
    }
}

/// Point on the tilted side through the left zero, `x in (-b, 0)`.
pub fn tilted_point(p: &QuinticParams, x: f64) -> C64 {
    match p.branch {
        Branch::First => C64::new(x, p.c - p.b - x),
        Branch::Second => C64::new(x, p.c + p.b + x),
    }
}

/// Corners `[z1, z2, apex]` of the locking triangle.
pub fn triangle(p: &QuinticParams) -> [C64; 3] {
    let [z1, z2, ..] = p.zeros();
    [z1, z2, tilted_point(p, 0.0)]
}

/// Whether `z` lies in the closed triangle, with slack `tol`.
pub fn in_triangle(p: &QuinticParams, z: C64, tol: f64) -> bool {
    let [a, b, c] = triangle(p);
    let cross = |u: C64, v: C64, w: C64| (v - u).re * (w - u).im - (v - u).im * (w - u).re;
    let area = cross(a, b, c);
    let s = area.signum();
    let e1 = s * cross(a, b, z) / (b - a).norm();
    let e2 = s * cross(b, c, z) / (c - b).norm();
    let e3 = s * cross(c, a, z) / (a - c).norm();
    e1 >= -tol && e2 >= -tol && e3 >= -tol
}

pub fn triangle_guards(p: &QuinticParams) -> Result<TriangleGuards> {
    let qd = build_q(p)?;
    let angles = emanation_angles(&qd, LEFT_ZERO, TrajectoryKind::Horizontal)?;
    let [z1, z2, apex] = triangle(p);
    let centroid = (z1 + z2 + apex) / 3.0;
    let inward = (centroid - z1).arg();
    let inward_angle = angles
        .iter()
        .copied()
        .min_by(|x, y| {
            crate::quaddiff::wrap_angle(x - inward)
                .abs()
                .total_cmp(&crate::quaddiff::wrap_angle(y - inward).abs())
        })
        .expect("three angles");

    // Im D(x + ic) = (1/2pi) \int_{-b}^{x} sqrt(b^2-s^2) Re[line_factor(s)] ds,
    // with s = -b cos(phi) to remove the endpoint root.
    let b = p.b;
    let integrand = |phi: f64| {
        let s = -b * phi.cos();
        let root = b * phi.sin();
        root * line_factor(p, s).re * b * phi.sin() / (2.0 * PI)
    };
    let samples = 2000;
    let mut values = Vec::with_capacity(samples - 1);
    for k in 1..samples {
        let x = -b + 2.0 * b * k as f64 / samples as f64;
        let phi = (-x / b).acos();
        values.push(integrate(integrand, 0.0, phi, 4, 16));
    }
    let mid = values[values.len() / 2];
    let anchor = if mid >= 0.0 { 1.0 } else { -1.0 };
    let segment_min_im_d = values.iter().map(|v| anchor * v).fold(f64::INFINITY, f64::min);

    // Re Q along the tilted line as a real polynomial in x
    let (slope, offset) = match p.branch {
        Branch::First => (C64::new(1.0, -1.0), C64::new(0.0, p.c - p.b)),
        Branch::Second => (C64::new(1.0, 1.0), C64::new(0.0, p.c + p.b)),
    };
    let re_q = restrict_real_part(qd.poly(), slope, offset)?;
    let tilted_roots = raw_roots(&re_q.to_complex(), 4000)?;
    let mut tilted_real_roots = real_roots(&re_q.to_complex(), 1e-8)?;
    tilted_real_roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    let mut tilted_max_re_q = f64::NEG_INFINITY;
    for k in 1..samples {
        let x = -b + b * k as f64 / samples as f64;
        tilted_max_re_q = tilted_max_re_q.max(qd.eval(tilted_point(p, x)).re);
    }
    let mut tilted_roots = tilted_roots;
    tilted_roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(TriangleGuards {
        branch: p.branch,
        emanation_angles: angles,
        inward_angle,
        cubic_coefficient: segment_cubic_coefficient(p),
        segment_min_im_d,
        segment_anchor: anchor,
        tilted_max_re_q,
        tilted_real_roots,
        tilted_roots,
        corners: [z1, z2, apex],
    })
}

/// Real polynomial `x -> Re q(slope x + offset)` for real `x`.
pub fn restrict_real_part(q: &CplxPoly, slope: C64, offset: C64) -> Result<RealPoly> {
    // Horner in polynomial arithmetic
    let lin = CplxPoly::new(vec![offset, slope])?;
    let mut acc = CplxPoly::constant(q.leading())?;
    for k in (0..q.degree()).rev() {
        acc = &acc * &lin;
        let mut c = acc.coeffs().to_vec();
        c[0] += q.coeff(k);
        acc = CplxPoly::new(c)?;
    }
    RealPoly::new(acc.coeffs().iter().map(|c| c.re).collect())
}

/// Sign check of `D'` along a half-line from the left simple zero, where
/// `D(z_1) = 0`: if `Re` and `Im` of the derivative keep one sign, neither
/// `Im D = 0` nor `Re D = 0` recurs on it and no horizontal or vertical
/// trajectory from `z_1` crosses it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineGuards {
    pub branch: Branch,
    /// Direction of the half-line at `z_1`; `pi` is `{x + ic : x < -b}`.
    pub direction: f64,
    /// Extremes of `R = -e^{i direction} D'(z)` (equal to `D'(x + ic)` on the
    /// horizontal line) over the samples, with `sqrt((z-z_1)(z-z_2)) ~ -z` at infinity.
    pub min_re_d_prime: f64,
    pub max_re_d_prime: f64,
    pub min_im_d_prime: f64,
    pub max_im_d_prime: f64,
    /// `|D'|` at `z_1`.
    pub endpoint_value: f64,
    /// Mismatch with the closed-form real/imaginary parts (horizontal line only).
    pub closed_form_gap: Option<f64>,
    pub samples: usize,
    /// Distance from `z_1` covered by the samples.
    pub length: f64,
}

impl HalfLineGuards {
    /// Both parts strictly one-signed.
    pub fn holds(&self) -> bool {
        let definite = |lo: f64, hi: f64| lo > 0.0 || hi < 0.0;
        definite(self.min_re_d_prime, self.max_re_d_prime) && definite(self.min_im_d_prime, self.max_im_d_prime)
    }
}

/// `D'(x + ic)` for `x < -b` with the positive root `sqrt(x^2 - b^2)`.
pub fn d_prime_on_line(p: &QuinticParams, x: f64) -> C64 {
    (x * x - p.b * p.b).max(0.0).sqrt() * line_factor(p, x) / (2.0 * PI)
}

/// Half-line used to separate the trajectories from `z_1`: the horizontal
/// `L` for `p = 1`; for the mirrored `p = 2` geometry the horizontal line
/// is crossed, and the ray halfway between the vertical direction `-7pi/10`
/// and the next horizontal one `-3pi/5` plays its role.
pub fn barrier_direction(branch: Branch) -> f64 {
    match branch {
        Branch::First => PI,
        Branch::Second => -13.0 * PI / 20.0,
    }
}

pub fn halfline_guards(p: &QuinticParams) -> HalfLineGuards {
    halfline_guards_along(p, barrier_direction(p.branch))
}

pub fn halfline_guards_along(p: &QuinticParams, direction: f64) -> HalfLineGuards {
    let samples = 2000;
    let length = 50.0;
    let [z1, z2, z0, z3, z4] = p.zeros();
    let dir = C64::from_polar(1.0, direction);
    let rest = |z: C64| (z - z0) * (z - z3) * (z - z4) / (2.0 * PI);
    // continue the root inwards from the far end, where it is close to -z
    let mut values = Vec::with_capacity(samples);
    let mut root = C64::new(0.0, 0.0);
    for j in (1..=samples).rev() {
        let z = z1 + dir * (length * j as f64 / samples as f64);
        let mut r = ((z - z1) * (z - z2)).sqrt();
        let reference = if j == samples { -z } else { root };
        if (r - reference).norm() > (r + reference).norm() {
            r = -r;
        }
        root = r;
        values.push((z, -dir * r * rest(z)));
    }
    let closed_form_gap = (direction == PI).then(|| {
        let k = segment_cubic_coefficient(p);
        let quad_const = 0.25 * (-p.a - p.c) * (p.a * p.a - 6.0 * p.a * p.c + 9.0 * p.c * p.c + 4.0 * p.d * p.d);
        values
            .iter()
            .map(|(z, v)| {
                let x = z.re;
                let root = (x * x - p.b * p.b).sqrt() / (2.0 * PI);
                let re_cf = root * (x * x * x - k * x);
                let im_cf = root * (4.0 * p.c * x * x + quad_const);
                ((v.re - re_cf).abs() / (1.0 + re_cf.abs())).max((v.im - im_cf).abs() / (1.0 + im_cf.abs()))
            })
            .fold(0.0, f64::max)
    });
    let fold = |f: fn(&C64) -> f64| {
        values.iter().map(|(_, v)| f(v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (min_re, max_re) = fold(|v| v.re);
    let (min_im, max_im) = fold(|v| v.im);
    HalfLineGuards {
        branch: p.branch,
        direction,
        min_re_d_prime: min_re,
        max_re_d_prime: max_re,
        min_im_d_prime: min_im,
        max_im_d_prime: max_im,
        endpoint_value: (rest(z1) * ((z1 - z1) * (z1 - z2)).sqrt()).norm(),
        closed_form_gap,
        samples,
        length,
    }
}

/// Horizontal directions `j pi / d` and vertical directions `j pi/d + pi/(2d)`, `j = 0..2d`.
pub fn direction_table(d: usize) -> (Vec<f64>, Vec<f64>) {
    let n = 2 * d;
    let theta: Vec<f64> = (0..n).map(|j| j as f64 * PI / d as f64).collect();
    let eps = theta.iter().map(|t| t + PI / (2.0 * d as f64)).collect();
    (theta, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PUBLISHED_FIRST: [f64; 5] = [-1.1082, 1.3489, 0.4877, 0.6781, -0.7979];
    const PUBLISHED_SECOND: [f64; 5] = [-0.9820, 0.7744, -1.3118, 1.0344, 0.1649];

    #[test]
    fn closed_forms_round_to_published_decimals() {
        for (branch, want) in [(Branch::First, PUBLISHED_FIRST), (Branch::Second, PUBLISHED_SECOND)] {
            let got = closed_form_params(branch).as_array();
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 5e-5, "{branch:?}: {got:?}");
            }
        }
    }

    #[test]
    fn numeric_solve_matches_closed_form() {
        for branch in [Branch::First, Branch::Second] {
            let cf = closed_form_params(branch).as_array();
            let nu = solve_params_numeric(branch).unwrap().as_array();
            for (x, y) in cf.iter().zip(nu) {
                assert!((x - y).abs() < 1e-9, "{branch:?}: {cf:?} vs {nu:?}");
            }
        }
    }

    #[test]
    fn e_is_half_difference() {
        let p = closed_form_params(Branch::First);
        assert!((p.e - 0.5 * (p.a - p.c)).abs() < 1e-12);
    }

    #[test]
    fn systems_vanish_at_closed_forms() {
        for branch in [Branch::First, Branch::Second] {
            let p = closed_form_params(branch);
            assert!(p.sys1_residuals().iter().all(|r| *r < 1e-9), "{:?}", p.sys1_residuals());
            assert!(p.sys2_residuals().iter().all(|r| *r < 1e-9), "{:?}", p.sys2_residuals());
            assert!(c_polynomial().eval(p.c).abs() < 1e-10);
            let (b2, d2) = bd_squared(p.a, p.c).unwrap();
            assert!((b2 - p.b * p.b).abs() < 1e-10 && (d2 - p.d * p.d).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_c_is_inconsistent() {
        assert!(matches!(params_from_c(Branch::First, 0.0), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn cubic_factor_divides_both_equations() {
        for branch in [Branch::First, Branch::Second] {
            let p = closed_form_params(branch);
            let cubic = common_cubic_factor(branch, p.c);
            let (f, g) = sys2_in_a(p.c);
            for r in raw_roots(&cubic, 500).unwrap() {
                let scale = (1.0 + r.norm()).powi(6) * 40.0;
                assert!(f.eval(r).norm() < 1e-9 * scale);
                assert!(g.eval(r).norm() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn resultant_vanishes_on_c_roots() {
        for branch in [Branch::First, Branch::Second] {
            let c = closed_form_params(branch).c;
            assert!(relative_resultant_in_a(c).unwrap() < 1e-10);
        }
        assert!(relative_resultant_in_a(0.3).unwrap() > 1e-6);
    }

    #[test]
    fn q_has_the_required_expansion() {
        for branch in [Branch::First, Branch::Second] {
            let qd = build_q(&closed_form_params(branch)).unwrap();
            assert!(expansion_error(&qd) < 1e-10);
        }
    }

    #[test]
    fn segment_coefficient_matches_published() {
        let p = closed_form_params(Branch::First);
        assert!((segment_cubic_coefficient(&p) - 0.5171).abs() < 1e-4);
    }

    #[test]
    fn direction_tables() {
        let (t, e) = direction_table(5);
        assert!((t[4] - 4.0 * PI / 5.0).abs() < 1e-15);
        assert!((e[4] - 0.9 * PI).abs() < 1e-15);
        assert!((e[0] - 0.1 * PI).abs() < 1e-15);
        let (t3, _) = direction_table(3);
        assert!((t3[2] - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_membership() {
        let p = closed_form_params(Branch::First);
        let [z1, z2, apex] = triangle(&p);
        let inside = (z1 + z2 + apex) / 3.0;
        assert!(in_triangle(&p, inside, 0.0));
        assert!(!in_triangle(&p, C64::new(0.0, p.c + 0.1), 0.0));
        assert!(in_triangle(&p, z1, 1e-12));
    }

    #[test]
    fn first_halfline_matches_closed_form_signs() {
        let p = closed_form_params(Branch::First);
        let g = halfline_guards(&p);
        assert!(g.holds(), "{g:?}");
        assert!(g.min_im_d_prime > 0.0 && g.max_re_d_prime < 0.0);
        assert!(g.closed_form_gap.unwrap() < 1e-9);
        assert_eq!(g.endpoint_value, 0.0);
        let at_minus_two = d_prime_on_line(&p, -2.0);
        assert!(at_minus_two.im > 0.0 && at_minus_two.re < 0.0);
    }

    #[test]
    fn second_branch_needs_the_tilted_ray() {
        let p = closed_form_params(Branch::Second);
        assert!(!halfline_guards_along(&p, PI).holds());
        let g = halfline_guards(&p);
        assert!(g.holds(), "{g:?}");
        assert!(g.closed_form_gap.is_none());
    }

    #[test]
    fn resultant_factorises_with_constant() {
        for c in [0.3, 0.7, -1.2, 1.1] {
            let r = resultant_in_a(c).unwrap();
            let f = c_polynomial().eval(c);
            let ratio = r / (c.powi(12) * f * f * f);
            assert!((ratio.re + 4_320_000.0).abs() < 1e-6 * 4_320_000.0, "c={c}: {ratio}");
            assert!(ratio.im.abs() < 1e-6 * 4_320_000.0);
        }
    }
}
