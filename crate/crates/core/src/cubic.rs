//! The cubic family `V(z) = -i z^3/3 + i K z`.
//!
//! The one-cut ansatz `Q(z) = -(z - z1)(z - z2)(z - z0)^2 / 4` with
//! `z0 = -ai`, `z1 = -b + ci`, `z2 = b + ci` forces `a = c = 2/b^2`,
//! `b^6 - 2 K b^4 - 8 = 0` and `C = -(b^6 + 4)/b^8`, where
//! `Q = -z^4/4 + K z^2/2 + i z + C`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, RealPoly, C64};
use crate::quaddiff::{QuadraticDifferential, Zero};
use crate::roots::{bracketed_root, real_root_in_interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    OneCut,
    Critical,
    TwoCut,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::OneCut => "one-cut",
            Phase::Critical => "critical",
            Phase::TwoCut => "two-cut",
        };
        f.write_str(s)
    }
}

/// Default tie tolerance in `K` for [`classify_phase`].
pub const PHASE_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicParams {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Constant term of `Q`.
    pub constant: f64,
    pub phase: Phase,
}

impl CubicParams {
    /// `[z0, z1, z2]`: the double zero and the two simple zeros.
    pub fn zeros(&self) -> [C64; 3] {
        [
            C64::new(0.0, -self.a),
            C64::new(-self.b, self.c),
            C64::new(self.b, self.c),
        ]
    }

    /// Residuals of the four coefficient-matching equations.
    pub fn system_residuals(&self) -> [f64; 4] {
        let (a, b, c, k) = (self.a, self.b, self.c, self.k);
        [
            0.5 * (c - a).abs(),
            (0.25 * b * b + 0.25 * c * c - c * a + 0.25 * a * a - 0.5 * k).abs(),
            (0.5 * a * (b * b + c * c - c * a) - 1.0).abs(),
            (-0.25 * (b * b + c * c) * a * a - self.constant).abs(),
        ]
    }
}

/// Unique positive root of `b^6 - 2 K b^4 - 8`.
pub fn solve_b(k: f64) -> Result<f64> {
    if !k.is_finite() {
        return Err(Error::Domain(format!("K must be finite, got {k}")));
    }
    let p = RealPoly::new(vec![-8.0, 0.0, 0.0, 0.0, -2.0 * k, 0.0, 1.0])?;
    let mut hi = 2.0;
    while p.eval(hi) <= 0.0 {
        hi *= 2.0;
    }
    real_root_in_interval(&p, 0.0, hi, 1e-15 * hi)
}

pub fn params_from_k(k: f64) -> Result<CubicParams> {
    let b = solve_b(k)?;
    let a = 2.0 / (b * b);
    let b2 = b * b;
    let constant = -(b2 * b2 * b2 + 4.0) / (b2 * b2 * b2 * b2);
    Ok(CubicParams {
        k,
        a,
        b,
        c: a,
        constant,
        phase: classify_phase(k, PHASE_TIE_TOL)?,
    })
}

/// `Q` in factored form, validated against `-z^4/4 + K z^2/2 + i z + C`.
pub fn build_q(params: &CubicParams) -> Result<QuadraticDifferential> {
    let [z0, z1, z2] = params.zeros();
    let qd = QuadraticDifferential::from_zeros(
        C64::new(-0.25, 0.0),
        vec![
            Zero { location: z0, multiplicity: 2 },
            Zero { location: z1, multiplicity: 1 },
            Zero { location: z2, multiplicity: 1 },
        ],
    )?;
    let expected = expansion(params.k, params.constant);
    let err = qd.poly().max_coeff_diff(&expected);
    if err > 1e-10 {
        return Err(Error::ZeroFactorizationMismatch(err));
    }
    Ok(qd)
}

/// `-z^4/4 + K z^2/2 + i z + C`.
pub fn expansion(k: f64, constant: f64) -> CplxPoly {
    CplxPoly::new(vec![
        C64::new(constant, 0.0),
        C64::new(0.0, 1.0),
        C64::new(0.5 * k, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-0.25, 0.0),
    ])
    .expect("nonzero")
}

/// Index of `z0`, `z1`, `z2` in the zero list of [`build_q`].
pub const DOUBLE_ZERO: usize = 0;
pub const LEFT_ZERO: usize = 1;
pub const RIGHT_ZERO: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub v: f64,
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

/// Left side of the transcendental equation for `v`.
pub fn v_equation(v: f64) -> f64 {
    let r = (4.0 + 2.0 * v).sqrt();
    -3.0 * v * (2.0 * v).ln() + 6.0 * v * (r + 2.0).ln() + (2.0 - 2.0 * v) * r
}

/// Critical constants, computed once.
///
/// `a*` is the root of [`f_at_minus_a`]; `v*` is the root of [`v_equation`].
/// They are related by `v = a^{-3}`, which is checked to `1e-8`.
pub fn critical_constants() -> Result<CriticalConstants> {
    static CACHE: OnceLock<std::result::Result<CriticalConstants, Error>> = OnceLock::new();
    CACHE.get_or_init(compute_critical_constants).clone()
}

fn compute_critical_constants() -> Result<CriticalConstants> {
    let a = bracketed_root(|a| f_at_minus_a(a).unwrap_or(f64::NAN), 0.1, 5.0, 1e-16)?;
    let v = bracketed_root(v_equation, 1.0, 10.0, 1e-15)?;
    let a_from_v = v.powf(-1.0 / 3.0);
    if (a_from_v - a).abs() > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "critical a from F(-a) = 0 is {a}, from the v-equation {a_from_v}"
        )));
    }
    let k = 1.0 / a - a * a;
    let k_from_v = v.cbrt() - v.powf(-2.0 / 3.0);
    if (k - k_from_v).abs() > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "critical K from a is {k}, from v {k_from_v}"
        )));
    }
    Ok(CriticalConstants {
        v,
        a,
        b: (2.0 / a).sqrt(),
        k,
    })
}

/// `F(y) = Im D(iy)`, closed form.
pub fn f_imag_axis(y: f64, params: &CubicParams) -> f64 {
    let (a, b) = (params.a, params.b);
    let s = y - a;
    let r = (s * s + b * b).sqrt();
    -(r * r * r) / (6.0 * PI) - a / (2.0 * PI) * s * r - (s + r).ln() / PI + b.ln() / PI
}

/// `F'(y) = -(y + a) sqrt((y - a)^2 + b^2) / (2 pi)`.
pub fn f_imag_axis_derivative(y: f64, params: &CubicParams) -> f64 {
    let s = y - params.a;
    -(y + params.a) * (s * s + params.b * params.b).sqrt() / (2.0 * PI)
}

/// `F(-a)` as a function of `a` alone (using `a b^2 = 2`).
pub fn f_at_minus_a(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    let a32 = a.powf(1.5);
    let r = (4.0 * a * a * a + 2.0).sqrt();
    Ok(((2.0 * a32 - 2.0 / a32) * r + 6.0 * (2.0 * a32 + r).ln() - 3.0 * 2f64.ln()) / (6.0 * PI))
}

/// `d/da F(-a) = (2a^3 + 1)^{3/2} / (sqrt(2) pi a^{5/2})`.
pub fn f_at_minus_a_derivative(a: f64) -> f64 {
    (2.0 * a * a * a + 1.0).powf(1.5) / (2f64.sqrt() * PI * a.powf(2.5))
}

pub fn classify_phase(k: f64, tol: f64) -> Result<Phase> {
    let kc = critical_constants()?.k;
    Ok(if (k - kc).abs() <= tol {
        Phase::Critical
    } else if k < kc {
        Phase::OneCut
    } else {
        Phase::TwoCut
    })
}

/// The two real zeros `y2 < -a < y1 < a` of `F`.
pub fn find_y1_y2(params: &CubicParams) -> Result<(f64, f64)> {
    let a = params.a;
    let f = |y| f_imag_axis(y, params);
    if !(f(-a) > 0.0) {
        return Err(Error::NoRealRoots(format!(
            "F(-a) = {:e} is not positive (phase {})",
            f(-a),
            params.phase
        )));
    }
    let y1 = bracketed_root(f, -a, a, 1e-15)?;
    let mut lo = -a - 1.0;
    while f(lo) > 0.0 {
        lo = -a + 2.0 * (lo + a);
    }
    let y2 = bracketed_root(f, lo, -a, 1e-15)?;
    Ok((polish(f, |y| f_imag_axis_derivative(y, params), y1), polish(f, |y| f_imag_axis_derivative(y, params), y2)))
}

fn polish(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut y: f64) -> f64 {
    for _ in 0..3 {
        let d = df(y);
        if d == 0.0 {
            break;
        }
        let step = f(y) / d;
        if !step.is_finite() || step.abs() > 1e-8 {
            break;
        }
        y -= step;
    }
    y
}

/// `Im D(x + ia) = (1/2pi) \int_{-b}^{x} s sqrt(b^2 - s^2) ds = -(b^2 - x^2)^{3/2} / (6 pi)`.
pub fn im_d_on_segment(params: &CubicParams, x: f64) -> Result<f64> {
    let b = params.b;
    if !(x.abs() < b) {
        return Err(Error::Domain(format!("|x| = {} must be below b = {b}", x.abs())));
    }
    Ok(-(b * b - x * x).powf(1.5) / (6.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_zero_is_exact() {
        let p = params_from_k(0.0).unwrap();
        assert!((p.b - 2f64.sqrt()).abs() < 1e-14);
        assert!((p.a - 1.0).abs() < 1e-14);
        assert!((p.c - 1.0).abs() < 1e-14);
        assert!((p.constant + 0.75).abs() < 1e-14);
        assert_eq!(p.phase, Phase::OneCut);
    }

    #[test]
    fn b_for_k_two_matches_bisection() {
        // independent oracle: plain bisection on b^6 - 4 b^4 - 8 over [1, 3]
        let (mut lo, mut hi) = (1.0f64, 3.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m.powi(6) - 4.0 * m.powi(4) - 8.0 < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let b = solve_b(2.0).unwrap();
        assert!((b - lo).abs() < 1e-13);
        assert!((b - 2.1003).abs() < 1e-4);
    }

    #[test]
    fn critical_constants_match_known_values() {
        let cc = critical_constants().unwrap();
        assert!((cc.v - 3.150037074).abs() < 1e-6);
        assert!((cc.k - 1.0005424).abs() < 1e-6);
        assert!((cc.a - 0.6821733958).abs() < 1e-9);
        assert!((cc.b - 1.712251710).abs() < 1e-9);
        assert!((cc.a * cc.b * cc.b - 2.0).abs() < 1e-12);
        assert!(v_equation(cc.v).abs() < 1e-10);
        assert!((solve_b(cc.k).unwrap() - cc.b).abs() < 1e-9);
    }

    #[test]
    fn f_at_minus_one() {
        // the closed form carries a 1/pi; pi F(-1) = -log(sqrt 6 - 2) + log(2)/2
        let v = f_at_minus_a(1.0).unwrap();
        let expected = (-(6f64.sqrt() - 2.0).ln() + 0.5 * 2f64.ln()) / PI;
        assert!((v - expected).abs() < 1e-14);
        assert!((PI * v - 1.1462).abs() < 1e-4);
        assert!(f_at_minus_a(0.0).is_err());
    }

    #[test]
    fn f_derivative_closed_form() {
        let h = 1e-6;
        let fd = (f_at_minus_a(1.0 + h).unwrap() - f_at_minus_a(1.0 - h).unwrap()) / (2.0 * h);
        let exact = 3f64.powf(1.5) / (2f64.sqrt() * PI);
        assert!((fd - exact).abs() < 1e-6 * exact);
        assert!((f_at_minus_a_derivative(1.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn f_general_agrees_with_f_at_minus_a() {
        for k in [-1.0, 0.0, 0.5, 2.0] {
            let p = params_from_k(k).unwrap();
            let x = f_imag_axis(-p.a, &p);
            let y = f_at_minus_a(p.a).unwrap();
            assert!((x - y).abs() < 1e-12, "K={k}: {x} vs {y}");
        }
    }

    #[test]
    fn f_signs() {
        let p = params_from_k(0.0).unwrap();
        assert!(f_imag_axis(100.0, &p) < 0.0);
        assert!(f_imag_axis(p.a, &p) < 0.0);
        assert!((f_imag_axis(p.a, &p) - im_d_on_segment(&p, 0.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn phases() {
        let kc = critical_constants().unwrap().k;
        assert_eq!(classify_phase(0.0, PHASE_TIE_TOL).unwrap(), Phase::OneCut);
        assert_eq!(classify_phase(2.0, PHASE_TIE_TOL).unwrap(), Phase::TwoCut);
        assert_eq!(classify_phase(kc, PHASE_TIE_TOL).unwrap(), Phase::Critical);
    }

    #[test]
    fn y_roots_at_k_zero() {
        let p = params_from_k(0.0).unwrap();
        let (y1, y2) = find_y1_y2(&p).unwrap();
        assert!(y2 < -1.0 && -1.0 < y1 && y1 < 1.0);
        assert!(f_imag_axis(y1, &p).abs() < 1e-10);
        assert!(f_imag_axis(y2, &p).abs() < 1e-10);
        assert!(find_y1_y2(&params_from_k(2.0).unwrap()).is_err());
    }

    #[test]
    fn y_roots_merge_near_critical() {
        let kc = critical_constants().unwrap().k;
        let p = params_from_k(kc - 1e-6).unwrap();
        let (y1, y2) = find_y1_y2(&p).unwrap();
        assert!((y1 + p.a).abs() < 1e-2 && (y2 + p.a).abs() < 1e-2);
    }

    #[test]
    fn segment_values() {
        let p = params_from_k(0.0).unwrap();
        let v = im_d_on_segment(&p, 0.0).unwrap();
        assert!((v + 2.0 * 2f64.sqrt() / (6.0 * PI)).abs() < 1e-14);
        assert!(im_d_on_segment(&p, -p.b + 1e-9).unwrap().abs() < 1e-12);
        assert!(im_d_on_segment(&p, p.b).is_err());
    }

    #[test]
    fn q_expansion_for_k_zero_and_two() {
        let p = params_from_k(0.0).unwrap();
        let qd = build_q(&p).unwrap();
        assert!(qd.eval(C64::new(-2f64.sqrt(), 1.0)).norm() < 1e-12);
        let p2 = params_from_k(2.0).unwrap();
        let qd2 = build_q(&p2).unwrap();
        assert!((qd2.poly().coeff(2) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
