//! Polynomial external fields `V` and their sectors at infinity.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, C64};

/// Where a direction at infinity sits relative to the sectors of `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectorLabel {
    /// `Re V -> +inf` along the ray (1-based index).
    Sector(usize),
    /// `Re V -> -inf` along the ray (1-based index).
    Complementary(usize),
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorLabel::Sector(j) => write!(f, "S{j}"),
            SectorLabel::Complementary(j) => write!(f, "S'{j}"),
        }
    }
}

/// Ordered pair of sectors a contour runs between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourClass {
    pub from: usize,
    pub to: usize,
}

impl ContourClass {
    pub fn new(from: usize, to: usize) -> Self {
        Self { from, to }
    }
}

impl fmt::Display for ContourClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{},{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    poly: CplxPoly,
    class: ContourClass,
}

impl Potential {
    /// `V(z) = -i z^3/3 + i K z` on contours from `S2` to `S1`.
    pub fn cubic(k: f64) -> Self {
        let poly = CplxPoly::new(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, k),
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0 / 3.0),
        ])
        .expect("nonzero");
        Self {
            poly,
            class: ContourClass::new(2, 1),
        }
    }

    /// `V(z) = -i z^5/5`; `class` is `T3,1` or `T4,5`.
    pub fn quintic(class: ContourClass) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); 6];
        c[5] = C64::new(0.0, -0.2);
        Self {
            poly: CplxPoly::new(c).expect("nonzero"),
            class,
        }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &CplxPoly {
        &self.poly
    }

    pub fn class(&self) -> ContourClass {
        self.class
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.poly.eval(z)
    }

    pub fn re_v(&self, z: C64) -> f64 {
        self.poly.eval(z).re
    }

    pub fn derivative(&self, z: C64) -> C64 {
        self.poly.eval_with_derivative(z).1
    }

    /// Open interval `(lo, hi)` of sector `S_j`, in radians, for `j = 1..=d`.
    pub fn sector(&self, j: usize) -> (f64, f64) {
        let d = self.degree() as f64;
        let j = j as f64;
        ((2.0 * j - 2.0) * PI / d, (2.0 * j - 1.0) * PI / d)
    }

    pub fn complementary_sector(&self, j: usize) -> (f64, f64) {
        let d = self.degree() as f64;
        let j = j as f64;
        ((2.0 * j - 1.0) * PI / d, 2.0 * j * PI / d)
    }

    /// Classify a direction at infinity.
    ///
    /// The sector boundaries are the rays `m pi / d`; directions within
    /// `1e-12` of one are rejected.
    pub fn sector_of(&self, angle: f64) -> Result<SectorLabel> {
        let d = self.degree();
        let width = PI / d as f64;
        let t = angle.rem_euclid(2.0 * PI);
        let q = t / width;
        let nearest = q.round();
        if (q - nearest).abs() * width < 1e-12 {
            return Err(Error::BoundaryAngle(angle));
        }
        let m = (q.floor() as usize) % (2 * d);
        Ok(if m % 2 == 0 {
            SectorLabel::Sector(m / 2 + 1)
        } else {
            SectorLabel::Complementary(m / 2 + 1)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_sectors() {
        let v = Potential::cubic(0.0);
        assert_eq!(v.sector_of(PI / 6.0).unwrap(), SectorLabel::Sector(1));
        assert_eq!(v.sector_of(5.0 * PI / 6.0).unwrap(), SectorLabel::Sector(2));
        assert_eq!(v.sector_of(-PI / 2.0).unwrap(), SectorLabel::Sector(3));
        assert_eq!(v.sector_of(PI / 2.0).unwrap(), SectorLabel::Complementary(1));
        assert!(matches!(v.sector_of(PI / 3.0), Err(Error::BoundaryAngle(_))));
    }

    #[test]
    fn quintic_sectors() {
        let v = Potential::quintic(ContourClass::new(3, 1));
        assert_eq!(v.sector_of(0.9 * PI).unwrap(), SectorLabel::Sector(3));
        assert_eq!(v.sector_of(0.1 * PI).unwrap(), SectorLabel::Sector(1));
        assert_eq!(v.sector_of(-0.7 * PI).unwrap(), SectorLabel::Sector(4));
        assert_eq!(v.sector_of(-0.3 * PI).unwrap(), SectorLabel::Sector(5));
    }

    #[test]
    fn re_v_sign_matches_sectors() {
        for v in [Potential::cubic(0.7), Potential::quintic(ContourClass::new(4, 5))] {
            for j in 1..=v.degree() {
                let (a, b) = v.sector(j);
                let z = C64::from_polar(10.0, 0.5 * (a + b));
                assert!(v.re_v(z) > 0.0);
                let (a, b) = v.complementary_sector(j);
                let z = C64::from_polar(10.0, 0.5 * (a + b));
                assert!(v.re_v(z) < 0.0);
            }
        }
    }
}
