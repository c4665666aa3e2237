//! Dense univariate polynomials with coefficients stored in ascending degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Complex polynomial, `coeffs[k]` multiplies `z^k`.
///
/// Trailing zero coefficients are stripped on construction so the stored
/// leading coefficient is always nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CplxPoly {
    coeffs: Vec<C64>,
}

impl CplxPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Result<Self> {
        Self::new(vec![c])
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(lead: C64, roots: &[C64]) -> Result<Self> {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().expect("nonempty by construction")
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_k| |z|^k`, the natural scale for rounding error in `eval`.
    pub fn abs_eval(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Derivative; the derivative of a constant is the zero constant, which
    /// we represent as `None`.
    pub fn derivative(&self) -> Option<Self> {
        if self.degree() == 0 {
            return None;
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Self::new(coeffs).ok()
    }

    pub fn nth_derivative(&self, n: usize) -> Option<Self> {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative()?;
        }
        Some(p)
    }

    pub fn scale(&self, s: C64) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Largest coefficient difference, padding the shorter one with zeros.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    fn add_raw(&self, other: &Self, sign: f64) -> Vec<C64> {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|k| self.coeff(k) + other.coeff(k) * sign).collect()
    }
}

impl fmt::Display for CplxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Mul for &CplxPoly {
    type Output = CplxPoly;

    fn mul(self, rhs: &CplxPoly) -> CplxPoly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        // product of nonzero leading coefficients is nonzero unless it underflows
        CplxPoly::new(out).expect("product of nonzero polynomials")
    }
}

impl Add for &CplxPoly {
    type Output = Result<CplxPoly>;

    fn add(self, rhs: &CplxPoly) -> Result<CplxPoly> {
        CplxPoly::new(self.add_raw(rhs, 1.0))
    }
}

impl Sub for &CplxPoly {
    type Output = Result<CplxPoly>;

    fn sub(self, rhs: &CplxPoly) -> Result<CplxPoly> {
        CplxPoly::new(self.add_raw(rhs, -1.0))
    }
}

impl Neg for &CplxPoly {
    type Output = CplxPoly;

    fn neg(self) -> CplxPoly {
        CplxPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Real polynomial, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn abs_eval(&self, x: f64) -> f64 {
        let r = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    pub fn to_complex(&self) -> CplxPoly {
        CplxPoly::from_real(&self.coeffs).expect("nonzero by construction")
    }
}
