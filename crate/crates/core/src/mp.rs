//! Multiprecision helpers over MPFR/MPC: working precision for a digit
//! count, Gauss-Legendre rules, polynomial roots.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Round;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::C64;
use crate::quadrature::gauss_legendre;

/// Mantissa bits for `digits` decimal digits plus 16 guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

pub fn to_c64(z: &Complex) -> C64 {
    C64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(z: C64, bits: u32) -> Complex {
    Complex::with_val(bits, (z.re, z.im))
}

/// `|z|` rounded to `f64` (fine for magnitudes far below `f64::EPSILON`).
pub fn abs_f64(z: &Complex) -> f64 {
    Float::with_val(z.prec().0, z.abs_ref()).to_f64()
}

pub fn decimal(x: &Float, digits: u32) -> String {
    x.to_string_radix_round(10, Some(digits as usize), Round::Nearest)
}

/// A complex number as decimal strings, for lossless JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: String,
    pub im: String,
}

impl DecimalComplex {
    pub fn new(z: &Complex, digits: u32) -> Self {
        Self {
            re: decimal(z.real(), digits),
            im: decimal(z.imag(), digits),
        }
    }
}

/// Gauss-Legendre rule on `[-1, 1]` at a given precision.
#[derive(Debug)]
pub struct MpRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(usize, u32), Arc<MpRule>>>;

fn rule_cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `(P_m(x), P_{m-1}(x))` by the three-term recurrence.
fn legendre_pair(m: usize, x: &Float) -> (Float, Float) {
    let bits = x.prec();
    let mut prev = Float::with_val(bits, 1);
    let mut cur = x.clone();
    for k in 1..m {
        let k = k as u32;
        let next = (Float::with_val(bits, x * &cur) * (2 * k + 1) - Float::with_val(bits, &prev * k)) / (k + 1);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Nodes by Newton from the double-precision rule; cached per `(order, bits)`.
pub fn gauss_legendre_mp(order: usize, bits: u32) -> Arc<MpRule> {
    if let Some(rule) = rule_cache().lock().expect("rule cache").get(&(order, bits)) {
        return rule.clone();
    }
    let seed = gauss_legendre(order);
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 4));
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for &x0 in &seed.nodes {
        let mut x = Float::with_val(bits, x0);
        let mut dp = Float::new(bits);
        for _ in 0..12 {
            let (p, q) = legendre_pair(order, &x);
            // P'_m = m (x P_m - P_{m-1}) / (x^2 - 1)
            let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
            dp = (Float::with_val(bits, &x * &p) - &q) * order as u32 / &x2m1;
            let dx = Float::with_val(bits, &p / &dp);
            x -= &dx;
            if dx.abs() < eps {
                let (p, q) = legendre_pair(order, &x);
                let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
                dp = (Float::with_val(bits, &x * &p) - &q) * order as u32 / &x2m1;
                break;
            }
        }
        let one_minus = 1u32 - Float::with_val(bits, x.square_ref());
        let w = Float::with_val(bits, 2u32) / (one_minus * Float::with_val(bits, dp.square_ref()));
        nodes.push(x);
        weights.push(w);
    }
    let rule = Arc::new(MpRule { nodes, weights });
    rule_cache()
        .lock()
        .expect("rule cache")
        .insert((order, bits), rule.clone());
    rule
}

/// `(p(z), p'(z))` for ascending coefficients.
pub fn eval_with_derivative(coeffs: &[Complex], z: &Complex) -> (Complex, Complex) {
    let bits = z.prec().0;
    let mut p = Complex::new(bits);
    let mut dp = Complex::new(bits);
    for c in coeffs.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
    }
    (p, dp)
}

/// Simultaneous (Aberth-Ehrlich) roots of `sum coeffs[k] z^k` at the
/// precision of the coefficients, started from `guesses`.
pub fn aberth_roots(coeffs: &[Complex], guesses: &[C64]) -> Result<Vec<Complex>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 || guesses.len() != degree {
        return Err(Error::Invalid(format!(
            "{} guesses for degree {degree}",
            guesses.len()
        )));
    }
    let bits = coeffs[degree].prec().0;
    let mut z: Vec<Complex> = guesses.iter().map(|&g| from_c64(g, bits)).collect();
    let tol = (-(bits as f64) + 12.0).exp2();
    // below this, a step that fails to halve the last one is rounding noise
    let settled = (-(bits as f64) / 2.0).exp2();
    let max_iterations = 400;
    let mut worst = f64::INFINITY;
    for _ in 0..max_iterations {
        let previous = worst;
        worst = 0.0;
        for i in 0..degree {
            let (p, dp) = eval_with_derivative(coeffs, &z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = Complex::with_val(bits, &p / &dp);
            let mut sum = Complex::new(bits);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let diff = Complex::with_val(bits, &z[i] - zj);
                    sum += diff.recip();
                }
            }
            let denom = 1u32 - Complex::with_val(bits, &ratio * &sum);
            let step = ratio / denom;
            let scale = abs_f64(&z[i]).max(1.0);
            worst = worst.max(abs_f64(&step) / scale);
            z[i] -= step;
        }
        if worst < tol || (worst < settled && worst > 0.5 * previous) {
            return Ok(z);
        }
    }
    Err(Error::RootsNotConverged {
        iterations: max_iterations,
        max_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn bits_cover_digits() {
        assert_eq!(bits_for_digits(60), 216);
        assert!(bits_for_digits(15) >= 53);
    }

    #[test]
    fn mp_rule_integrates_x_to_the_62() {
        let bits = bits_for_digits(60);
        let rule = gauss_legendre_mp(32, bits);
        let mut sum = Float::new(bits);
        let mut wsum = Float::new(bits);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            sum += Float::with_val(bits, x.pow(62u32)) * w;
            wsum += w;
        }
        let exact = Float::with_val(bits, 2u32) / 63u32;
        let err = Float::with_val(bits, &sum - &exact).abs().to_f64();
        assert!(err < 1e-58, "{err:e}");
        assert!(Float::with_val(bits, &wsum - 2u32).abs().to_f64() < 1e-58);
    }

    #[test]
    fn aberth_finds_roots_of_unity_to_high_precision() {
        let bits = bits_for_digits(50);
        // z^7 - 1
        let mut coeffs = vec![Complex::new(bits); 8];
        coeffs[0] = Complex::with_val(bits, -1);
        coeffs[7] = Complex::with_val(bits, 1);
        let guesses: Vec<C64> = (0..7)
            .map(|k| C64::from_polar(1.1, 0.4 + k as f64 * 0.9))
            .collect();
        let roots = aberth_roots(&coeffs, &guesses).unwrap();
        for r in &roots {
            let (p, _) = eval_with_derivative(&coeffs, r);
            assert!(abs_f64(&p) < 1e-45);
        }
    }

    #[test]
    fn decimal_strings_keep_digits() {
        let bits = bits_for_digits(40);
        let third = Float::with_val(bits, 1) / 3u32;
        let z = Complex::with_val(bits, (&third, -Float::with_val(bits, &third)));
        let d = DecimalComplex::new(&z, 30);
        assert!(d.re.starts_with("3.33333333333333333333333333333"));
        assert!(d.im.starts_with("-3.3333333"));
    }
}
