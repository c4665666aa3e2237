//! Monic polynomials `P_n` with `\int_Gamma z^k P_n(z) e^{-n V(z)} dz = 0`
//! for `k < n`: contour moments at high precision, a Hankel solve, zeros,
//! and comparison of the zero distribution with the equilibrium measure.

use std::f64::consts::{LN_10, PI};

use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::equilibrium::ArcMeasure;
use crate::error::{Error, Result};
use crate::mp::{abs_f64, aberth_roots, bits_for_digits, from_c64, gauss_legendre_mp, to_c64, DecimalComplex};
use crate::poly::{CplxPoly, C64};
use crate::potential::{Potential, SectorLabel};
use crate::roots::raw_roots;

/// Largest radius the truncated contour may reach.
pub const MAX_RADIUS: f64 = 50.0;
/// Zeros farther than this from the arc are not projected onto it.
pub const OFF_ARC_DISTANCE: f64 = 0.5;
const GL_ORDER: usize = 40;
const MAX_DEPTH: usize = 40;

/// `P = max(50, 6 n)` decimal digits.
pub fn default_digits(n: usize) -> u32 {
    (6 * n as u32).max(50)
}

/// Where the integrand is cut off: `n` of the weight and the digit target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n: usize,
    pub digits: u32,
}

/// Two rays from `through` along the centres of the sectors of the contour
/// class, oriented from `S_from` to `S_to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadContour {
    pub vertices: Vec<C64>,
    pub through: C64,
    /// Ray directions (radians) into `S_from` and `S_to`.
    pub directions: (f64, f64),
    pub truncation: Truncation,
}

impl QuadContour {
    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

fn sector_centre(pot: &Potential, j: usize) -> f64 {
    let (lo, hi) = pot.sector(j);
    0.5 * (lo + hi)
}

/// `log |z^{2n} e^{-n V(z)}|` bound used for truncation, with `(1 + |z|)`.
fn log_bound(pot: &Potential, n: usize, z: C64) -> f64 {
    -(n as f64) * pot.re_v(z) + 2.0 * n as f64 * (1.0 + z.norm()).ln()
}

/// Contour for the class of `pot`, cut where
/// `|e^{-nV}| (1 + |z|)^{2n}` is below `10^{-(P + 10)}` of its maximum.
pub fn quadrature_contour(pot: &Potential, through: C64, truncation: Truncation) -> Result<QuadContour> {
    let class = pot.class();
    let dirs = (sector_centre(pot, class.from), sector_centre(pot, class.to));
    let step = 0.01;
    let steps = (MAX_RADIUS / step) as usize;
    let profile = |theta: f64| -> Vec<f64> {
        (0..=steps)
            .map(|k| log_bound(pot, truncation.n, through + C64::from_polar(k as f64 * step, theta)))
            .collect()
    };
    let (p_from, p_to) = (profile(dirs.0), profile(dirs.1));
    let peak = p_from.iter().chain(&p_to).cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = peak - (truncation.digits as f64 + 10.0) * LN_10;
    let radius = |p: &[f64]| -> Result<f64> {
        let last = p.iter().rposition(|&v| v >= floor).unwrap_or(0);
        if last + 1 >= p.len() {
            return Err(Error::TruncationUnreachable(MAX_RADIUS));
        }
        Ok((last + 1) as f64 * step)
    };
    let (r_from, r_to) = (radius(&p_from)?, radius(&p_to)?);
    let start = through + C64::from_polar(r_from, dirs.0);
    let end = through + C64::from_polar(r_to, dirs.1);
    for (z, j) in [(start, class.from), (end, class.to)] {
        if pot.sector_of(z.arg())? != SectorLabel::Sector(j) {
            return Err(Error::Domain(format!("contour end {z} is not in sector S{j}")));
        }
    }
    Ok(QuadContour {
        vertices: vec![start, through, end],
        through,
        directions: dirs,
        truncation,
    })
}

/// `m_k = \int_Gamma z^k e^{-n V(z)} dz`, `k = 0..count`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub n: usize,
    pub digits: u32,
    pub bits: u32,
    pub contour: QuadContour,
    pub moments: Vec<Complex>,
    /// `\int |z^k e^{-nV}| |dz|`: the scale quadrature error is measured against.
    pub scales: Vec<f64>,
    pub panels: usize,
}

impl MomentTable {
    pub fn count(&self) -> usize {
        self.moments.len()
    }

    /// `max_k |m_k - (-1)^k conj(m_k)| / scale_k`, zero for a weight with
    /// `V(-conj z) = conj V(z)` on a contour symmetric under `z -> -conj z`.
    pub fn reflection_defect(&self) -> f64 {
        self.moments
            .iter()
            .zip(&self.scales)
            .enumerate()
            .map(|(k, (m, s))| {
                let mut r = m.clone().conj();
                if k % 2 == 1 {
                    r = -r;
                }
                abs_f64(&Complex::with_val(self.bits, m - &r)) / s
            })
            .fold(0.0, f64::max)
    }

    /// `max_k |m_k - m'_k| / scale_k` against another table.
    pub fn agreement(&self, other: &MomentTable) -> f64 {
        self.moments
            .iter()
            .zip(&other.moments)
            .zip(self.scales.iter().zip(&other.scales))
            .map(|((a, b), (s, t))| abs_f64(&Complex::with_val(self.bits, a - b)) / s.max(*t))
            .fold(0.0, f64::max)
    }

    pub fn to_report(&self) -> MomentReport {
        MomentReport {
            n: self.n,
            precision: self.digits,
            contour: self.contour.clone(),
            moments: self.moments.iter().map(|m| DecimalComplex::new(m, self.digits)).collect(),
            scales: self.scales.clone(),
            panels: self.panels,
        }
    }
}

/// JSON form of a [`MomentTable`] with moments as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub precision: u32,
    pub contour: QuadContour,
    pub moments: Vec<DecimalComplex>,
    pub scales: Vec<f64>,
    pub panels: usize,
}

/// Point at fraction `p / pieces` of `[a, b]`, exact at both ends so that
/// consecutive segments share their vertex bit for bit.
fn panel_point(a: C64, b: C64, p: usize, pieces: usize) -> C64 {
    if p == 0 {
        a
    } else if p == pieces {
        b
    } else {
        a + (b - a) * (p as f64 / pieces as f64)
    }
}

struct PanelSum {
    values: Vec<Complex>,
    scales: Vec<f64>,
}

fn panel_sum(
    v_coeffs: &[Complex],
    n: usize,
    count: usize,
    a: &Complex,
    b: &Complex,
    bits: u32,
) -> PanelSum {
    let rule = gauss_legendre_mp(GL_ORDER, bits);
    let half = Complex::with_val(bits, b - a) / 2u32;
    let mid = Complex::with_val(bits, a + b) / 2u32;
    let mut values = vec![Complex::new(bits); count];
    let mut scales = vec![0.0; count];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let z = Complex::with_val(bits, &half * x) + &mid;
        let mut v = Complex::new(bits);
        for c in v_coeffs.iter().rev() {
            v *= &z;
            v += c;
        }
        v *= n as u32;
        let weight = (-v).exp() * &half * w;
        let zabs = abs_f64(&z);
        let mut mag = abs_f64(&weight);
        let mut acc = weight;
        for k in 0..count {
            values[k] += &acc;
            scales[k] += mag;
            if k + 1 < count {
                acc *= &z;
                mag *= zabs;
            }
        }
    }
    PanelSum { values, scales }
}

/// Moments along `contour` by adaptive Gauss-Legendre panels at `digits`.
pub fn moments_on(pot: &Potential, n: usize, count: usize, digits: u32, contour: &QuadContour) -> Result<MomentTable> {
    if count < 2 * n + 1 {
        return Err(Error::Invalid(format!("{count} moments for n = {n}; need 2n + 1")));
    }
    if n >= 8 && digits < 50 {
        return Err(Error::Invalid(format!("{digits} digits for n = {n}; need at least 50")));
    }
    let bits = bits_for_digits(digits);
    let v_coeffs: Vec<Complex> = pot.poly().coeffs().iter().map(|&c| from_c64(c, bits)).collect();
    let length = contour.length();
    // coarse pass for the per-k error scale
    let mut coarse_scales = vec![0.0; count];
    for seg in contour.vertices.windows(2) {
        let pieces = ((seg[1] - seg[0]).norm() / 0.25).ceil().max(1.0) as usize;
        for p in 0..pieces {
            let a = from_c64(panel_point(seg[0], seg[1], p, pieces), bits);
            let b = from_c64(panel_point(seg[0], seg[1], p + 1, pieces), bits);
            let s = panel_sum(&v_coeffs, n, count, &a, &b, bits);
            for k in 0..count {
                coarse_scales[k] += s.scales[k];
            }
        }
    }
    let tol_factor = 10f64.powi(-(digits as i32 + 3));
    // rounding level of a panel sum: tiny panels can't beat it, whatever their share
    let noise_floor = 2f64.powi(8 - bits as i32);
    let mut moments = vec![Complex::new(bits); count];
    let mut scales = vec![0.0; count];
    let mut panels = 0usize;
    for seg in contour.vertices.windows(2) {
        let pieces = ((seg[1] - seg[0]).norm() / 0.25).ceil().max(1.0) as usize;
        let mut stack: Vec<(C64, C64, usize)> = (0..pieces)
            .rev()
            .map(|p| {
                (
                    panel_point(seg[0], seg[1], p, pieces),
                    panel_point(seg[0], seg[1], p + 1, pieces),
                    0,
                )
            })
            .collect();
        while let Some((a, b, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (za, zm, zb) = (from_c64(a, bits), from_c64(m, bits), from_c64(b, bits));
            let whole = panel_sum(&v_coeffs, n, count, &za, &zb, bits);
            let left = panel_sum(&v_coeffs, n, count, &za, &zm, bits);
            let right = panel_sum(&v_coeffs, n, count, &zm, &zb, bits);
            let share = (b - a).norm() / length;
            let mut worst: f64 = 0.0;
            let mut at_floor = true;
            for k in 0..count {
                let halves = Complex::with_val(bits, &left.values[k] + &right.values[k]);
                let diff = abs_f64(&Complex::with_val(bits, &whole.values[k] - &halves));
                worst = worst.max(diff / (coarse_scales[k] * share));
                at_floor &= diff <= noise_floor * (left.scales[k] + right.scales[k]);
            }
            if worst <= tol_factor || at_floor {
                for k in 0..count {
                    moments[k] += &left.values[k];
                    moments[k] += &right.values[k];
                    scales[k] += left.scales[k] + right.scales[k];
                }
                panels += 2;
            } else if depth >= MAX_DEPTH {
                return Err(Error::SubdivisionLimit {
                    worst_start: format!("{a}"),
                    worst_end: format!("{b}"),
                    worst_error: worst,
                });
            } else {
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
    }
    Ok(MomentTable {
        n,
        digits,
        bits,
        contour: contour.clone(),
        moments,
        scales,
        panels,
    })
}

/// Moments on the default contour (rays through the origin).
pub fn moments(pot: &Potential, n: usize, count: usize, digits: u32) -> Result<MomentTable> {
    let contour = quadrature_contour(pot, C64::new(0.0, 0.0), Truncation { n, digits })?;
    moments_on(pot, n, count, digits, &contour)
}

/// Vertex of the independent second contour used as a residual oracle.
pub fn second_contour_vertex() -> C64 {
    C64::new(0.15, -0.35)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPoly {
    pub n: usize,
    pub digits: u32,
    /// Ascending; `coeffs[n] = 1`.
    pub coeffs: Vec<Complex>,
    pub zeros: Vec<Complex>,
    /// `|\sum_j c_j m_{k+j}| / \sum_j |c_j| |m_{k+j}|` on the solving table.
    pub residuals: Vec<f64>,
}

impl OrthoPoly {
    pub fn zeros_f64(&self) -> Vec<C64> {
        self.zeros.iter().map(to_c64).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// `max_j min_i |z_i + conj z_j|`.
    pub fn reflection_asymmetry(&self) -> f64 {
        let bits = self.coeffs[0].prec().0;
        self.zeros
            .iter()
            .map(|z| {
                let mirror = -z.clone().conj();
                self.zeros
                    .iter()
                    .map(|w| abs_f64(&Complex::with_val(bits, w - &mirror)))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_report(&self) -> OrthoPolyReport {
        OrthoPolyReport {
            n: self.n,
            precision: self.digits,
            coeffs: self.coeffs.iter().map(|c| DecimalComplex::new(c, self.digits)).collect(),
            zeros: self.zeros.iter().map(|z| DecimalComplex::new(z, self.digits)).collect(),
            residuals: self.residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoPolyReport {
    pub n: usize,
    pub precision: u32,
    pub coeffs: Vec<DecimalComplex>,
    pub zeros: Vec<DecimalComplex>,
    pub residuals: Vec<f64>,
}

/// Scaled residuals `|\int z^k P_n e^{-nV} dz| / \sum_j |c_j| |m_{k+j}|`,
/// `k < n`, with the moments of `table` (possibly another contour).
pub fn orthogonality_residuals(coeffs: &[Complex], table: &MomentTable) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let bits = table.bits;
    (0..n)
        .map(|k| {
            let mut sum = Complex::new(bits);
            let mut norm = 0.0;
            for (j, c) in coeffs.iter().enumerate() {
                let term = Complex::with_val(bits, c * &table.moments[k + j]);
                norm += abs_f64(&term);
                sum += term;
            }
            abs_f64(&sum) / norm
        })
        .collect()
}

/// Solve `sum_j c_j m_{k+j} = -m_{k+n}`, `k < n`, and find the zeros.
pub fn hankel_solve(table: &MomentTable, n: usize) -> Result<OrthoPoly> {
    if table.count() < 2 * n {
        return Err(Error::Invalid(format!("{} moments for degree {n}", table.count())));
    }
    let bits = table.bits;
    let mut a: Vec<Vec<Complex>> = (0..n)
        .map(|k| {
            let mut row: Vec<Complex> = (0..n).map(|j| table.moments[k + j].clone()).collect();
            row.push(-table.moments[k + n].clone());
            row
        })
        .collect();
    let max_entry = a
        .iter()
        .flat_map(|r| r[..n].iter())
        .map(abs_f64)
        .fold(0.0, f64::max);
    let singular = max_entry * 10f64.powi(-(table.digits as i32));
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, abs_f64(&a[r][col])))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        if pivot <= singular {
            return Err(Error::IncreasePrecision {
                column: col,
                pivot: pivot / max_entry.max(f64::MIN_POSITIVE),
            });
        }
        a.swap(col, pivot_row);
        let inv = a[col][col].clone().recip();
        for r in col + 1..n {
            let factor = Complex::with_val(bits, &a[r][col] * &inv);
            for c in col..=n {
                let t = Complex::with_val(bits, &factor * &a[col][c]);
                a[r][c] -= t;
            }
        }
    }
    let mut coeffs = vec![Complex::new(bits); n + 1];
    coeffs[n] = Complex::with_val(bits, 1);
    for r in (0..n).rev() {
        let mut s = a[r][n].clone();
        for c in r + 1..n {
            s -= Complex::with_val(bits, &a[r][c] * &coeffs[c]);
        }
        coeffs[r] = s / &a[r][r];
    }
    let residuals = orthogonality_residuals(&coeffs, table);
    let zeros = if n == 0 { Vec::new() } else { mp_zeros(&coeffs)? };
    Ok(OrthoPoly {
        n,
        digits: table.digits,
        coeffs,
        zeros,
        residuals,
    })
}

fn mp_zeros(coeffs: &[Complex]) -> Result<Vec<Complex>> {
    let n = coeffs.len() - 1;
    let approx: Vec<C64> = coeffs.iter().map(to_c64).collect();
    let guesses = CplxPoly::new(approx)
        .and_then(|p| raw_roots(&p, 500))
        .unwrap_or_else(|_| {
            (0..n)
                .map(|k| C64::from_polar(1.0, 0.3 + 2.0 * PI * k as f64 / n as f64))
                .collect()
        });
    // coincident double-precision guesses would stall the simultaneous iteration
    let mut guesses = guesses;
    for i in 0..guesses.len() {
        for j in 0..i {
            if (guesses[i] - guesses[j]).norm() < 1e-12 {
                guesses[i] += C64::new(1e-8, 1e-8 * (i as f64 + 1.0));
            }
        }
    }
    let mut zeros = aberth_roots(coeffs, &guesses)?;
    zeros.sort_by(|a, b| {
        let (a, b) = (to_c64(a), to_c64(b));
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    Ok(zeros)
}

/// `P_n` for several `n` concurrently, each on its own moment table;
/// results come back in the order of `ns`.
pub fn solve_many(pot: &Potential, ns: &[usize], digits: impl Fn(usize) -> u32 + Sync) -> Vec<Result<(MomentTable, OrthoPoly)>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let digits = &digits;
                scope.spawn(move || {
                    let table = moments(pot, n, 2 * n + 1, digits(n))?;
                    let op = hankel_solve(&table, n)?;
                    Ok((table, op))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("moment worker panicked"))
            .collect()
    })
}

/// Zeros against the equilibrium measure of the arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCloud {
    pub zeros: Vec<C64>,
    pub distances: Vec<f64>,
    /// Over all zeros, including off-arc ones.
    pub max_distance: f64,
    /// Indices of zeros farther than [`OFF_ARC_DISTANCE`]; not projected.
    pub off_arc: Vec<usize>,
    /// `sup |F_n - F|` between the empirical CDF of the projected zeros
    /// (ordered along the arc) and the equilibrium CDF `t / mass`.
    pub kolmogorov: f64,
    pub projected: usize,
}

pub fn compare_to_measure(op: &OrthoPoly, measure: &ArcMeasure) -> ZeroCloud {
    zero_cloud(&op.zeros_f64(), measure)
}

pub fn zero_cloud(zeros: &[C64], measure: &ArcMeasure) -> ZeroCloud {
    let mut distances = Vec::with_capacity(zeros.len());
    let mut off_arc = Vec::new();
    let mut cdf = Vec::new();
    for (i, &z) in zeros.iter().enumerate() {
        let (d, t) = measure.project(z);
        distances.push(d);
        if d > OFF_ARC_DISTANCE {
            off_arc.push(i);
        } else {
            cdf.push((t / measure.mass()).clamp(0.0, 1.0));
        }
    }
    cdf.sort_by(f64::total_cmp);
    let m = cdf.len() as f64;
    let kolmogorov = cdf
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / m - f).max(f - i as f64 / m))
        .fold(0.0, f64::max);
    ZeroCloud {
        max_distance: distances.iter().cloned().fold(0.0, f64::max),
        zeros: zeros.to_vec(),
        distances,
        off_arc,
        kolmogorov,
        projected: cdf.len(),
    }
}

/// How the zeros sit relative to the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSplit {
    pub left: usize,
    pub right: usize,
    pub on_axis: usize,
    /// Width of the zero-free strip around the imaginary axis.
    pub axis_gap: f64,
    /// Largest nearest-neighbour distance within either half.
    pub max_spacing: f64,
    /// Two equal halves and a strip wider than `2 max_spacing`.
    pub separated: bool,
}

pub fn axis_split(zeros: &[C64]) -> AxisSplit {
    let on_axis = zeros.iter().filter(|z| z.re.abs() <= 1e-8 * (1.0 + z.norm())).count();
    let left: Vec<C64> = zeros.iter().cloned().filter(|z| z.re < 0.0 && z.re.abs() > 1e-8 * (1.0 + z.norm())).collect();
    let right: Vec<C64> = zeros.iter().cloned().filter(|z| z.re > 0.0 && z.re.abs() > 1e-8 * (1.0 + z.norm())).collect();
    let spacing = |side: &[C64]| -> f64 {
        side.iter()
            .enumerate()
            .map(|(i, a)| {
                side.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, b)| (a - b).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    };
    let axis_gap = if on_axis > 0 {
        0.0
    } else {
        2.0 * zeros.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min)
    };
    let max_spacing = spacing(&left).max(spacing(&right));
    AxisSplit {
        left: left.len(),
        right: right.len(),
        on_axis,
        axis_gap,
        max_spacing,
        separated: on_axis == 0 && left.len() == right.len() && axis_gap > 2.0 * max_spacing,
    }
}

/// Decimal digits lost to cancellation in each moment, `log10(scale_k / |m_k|)`.
pub fn cancellation_digits(table: &MomentTable) -> Vec<f64> {
    table
        .moments
        .iter()
        .zip(&table.scales)
        .map(|(m, s)| (s / abs_f64(m).max(f64::MIN_POSITIVE)).log10())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::ContourClass;

    #[test]
    fn cubic_contour_leaves_through_sector_centres() {
        let pot = Potential::cubic(0.0);
        let c = quadrature_contour(&pot, C64::new(0.0, 0.0), Truncation { n: 12, digits: 60 }).unwrap();
        assert!((c.directions.0 - 5.0 * PI / 6.0).abs() < 1e-12);
        assert!((c.directions.1 - PI / 6.0).abs() < 1e-12);
        assert!(c.vertices[0].norm() < MAX_RADIUS && c.vertices[2].norm() > 1.0);
    }

    #[test]
    fn quintic_contours_use_class_sectors() {
        let t31 = Potential::quintic(ContourClass::new(3, 1));
        let c = quadrature_contour(&t31, C64::new(0.0, 0.0), Truncation { n: 8, digits: 50 }).unwrap();
        assert!((c.directions.0 - 0.9 * PI).abs() < 1e-12 && (c.directions.1 - 0.1 * PI).abs() < 1e-12);
        let t45 = Potential::quintic(ContourClass::new(4, 5));
        let c = quadrature_contour(&t45, C64::new(0.0, 0.0), Truncation { n: 8, digits: 50 }).unwrap();
        assert!((c.directions.0 - 1.3 * PI).abs() < 1e-12 && (c.directions.1 - 1.7 * PI).abs() < 1e-12);
    }

    #[test]
    fn unreachable_truncation_is_an_error() {
        // Re V = r^3/3 - K r/2 on both rays stays negative up to r = 50
        let pot = Potential::cubic(10000.0);
        let err = quadrature_contour(&pot, C64::new(0.0, 0.0), Truncation { n: 1, digits: 50 });
        assert!(matches!(err, Err(Error::TruncationUnreachable(_))), "{err:?}");
    }

    #[test]
    fn first_polynomial_has_an_imaginary_zero() {
        let pot = Potential::cubic(0.0);
        let table = moments(&pot, 1, 3, 50).unwrap();
        assert!(abs_f64(&table.moments[0]) > 0.1);
        let op = hankel_solve(&table, 1).unwrap();
        let z = to_c64(&op.zeros[0]);
        assert!(z.re.abs() < 1e-40, "{z}");
        assert!(table.reflection_defect() < 1e-25);
    }

    #[test]
    fn k0_moments_vanish_in_steps_of_three() {
        // m_k carries e^{i(k+1)pi/6} - e^{i5(k+1)pi/6}, zero when 3 | k+1
        let pot = Potential::cubic(0.0);
        let table = moments(&pot, 4, 9, 50).unwrap();
        for k in [2, 5, 8] {
            assert!(abs_f64(&table.moments[k]) / table.scales[k] < 1e-45, "k={k}");
        }
    }

    #[test]
    fn moments_do_not_depend_on_the_contour() {
        let pot = Potential::cubic(0.5);
        let digits = 50;
        let a = moments(&pot, 6, 13, digits).unwrap();
        let c2 = quadrature_contour(&pot, second_contour_vertex(), Truncation { n: 6, digits }).unwrap();
        let b = moments_on(&pot, 6, 13, digits, &c2).unwrap();
        assert!(a.agreement(&b) < 1e-25, "{:e}", a.agreement(&b));
    }

    #[test]
    fn too_few_moments_or_digits_rejected() {
        let pot = Potential::cubic(0.0);
        assert!(matches!(moments(&pot, 4, 8, 50), Err(Error::Invalid(_))));
        assert!(matches!(moments(&pot, 8, 17, 30), Err(Error::Invalid(_))));
    }

    #[test]
    fn singular_hankel_asks_for_precision() {
        let pot = Potential::cubic(0.0);
        let mut table = moments(&pot, 3, 7, 50).unwrap();
        for m in table.moments.iter_mut() {
            *m = Complex::with_val(table.bits, 1);
        }
        assert!(matches!(hankel_solve(&table, 3), Err(Error::IncreasePrecision { .. })));
    }

    #[test]
    fn axis_split_on_synthetic_clusters() {
        let two: Vec<C64> = (0..4)
            .flat_map(|k| {
                let y = -0.5 + 0.1 * k as f64;
                [C64::new(-1.0 - 0.1 * k as f64, y), C64::new(1.0 + 0.1 * k as f64, y)]
            })
            .collect();
        assert!(axis_split(&two).separated);
        let one: Vec<C64> = (0..8).map(|k| C64::new(-0.35 + 0.1 * k as f64, 0.0)).collect();
        let s = axis_split(&one);
        assert!(!s.separated && s.left == 4 && s.right == 4);
    }
}
