//! Simultaneous (Aberth–Ehrlich) root finding and bracketed real roots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, RealPoly, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub value: C64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Absolute clustering radius; `None` uses `1e-7 * (1 + max|root|)`.
    pub cluster_radius: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            cluster_radius: None,
        }
    }
}

/// All roots of `p` (with repetition), unsorted.
pub fn raw_roots(p: &CplxPoly, max_iterations: usize) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::DegreeTooLow { required: 1, actual: 0 });
    }
    let a = p.coeffs();
    if n == 1 {
        return Ok(vec![-a[0] / a[1]]);
    }
    // initial guesses on a circle of the Fujiwara-type radius, slightly rotated
    let lead = p.leading().norm();
    let radius = (0..n)
        .map(|k| (a[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius, t)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..max_iterations {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() <= 4.0 * f64::EPSILON * p.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += 1.0 / diff;
                    }
                }
            }
            let step = if ratio.is_finite() {
                let w = ratio / (1.0 - ratio * s);
                if w.is_finite() { w } else { ratio }
            } else {
                C64::new(1e-8 * (1.0 + z[i].norm()), 0.0)
            };
            z[i] -= step;
            if step.norm() <= 2.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    let max_residual = z
        .iter()
        .map(|&x| p.eval(x).norm() / p.abs_eval(x).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if max_residual < 1e-12 {
        return Ok(z);
    }
    Err(Error::RootsNotConverged {
        iterations: max_iterations,
        max_residual,
    })
}

/// Roots grouped into clusters; each cluster value is the centroid.
pub fn poly_roots(p: &CplxPoly, opts: RootOptions) -> Result<Vec<RootCluster>> {
    let z = raw_roots(p, opts.max_iterations)?;
    let max_abs = z.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let radius = opts.cluster_radius.unwrap_or(1e-7 * (1.0 + max_abs));
    Ok(cluster(&z, radius))
}

/// Single-linkage clustering of points within `radius`.
pub fn cluster(z: &[C64], radius: f64) -> Vec<RootCluster> {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (z[i] - z[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match out.iter_mut().find(|(root, _, _)| *root == r) {
            Some(entry) => {
                entry.1 += z[i];
                entry.2 += 1;
            }
            None => out.push((r, z[i], 1)),
        }
    }
    let mut clusters: Vec<RootCluster> = out
        .into_iter()
        .map(|(_, s, m)| RootCluster {
            value: s / m as f64,
            multiplicity: m,
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    clusters
}

/// Roots whose imaginary part is below `tol * (1 + |root|)`, returned as reals, ascending.
pub fn real_roots(p: &CplxPoly, tol: f64) -> Result<Vec<f64>> {
    let mut r: Vec<f64> = raw_roots(p, RootOptions::default().max_iterations)?
        .into_iter()
        .filter(|z| z.im.abs() <= tol * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect();
    r.sort_by(f64::total_cmp);
    Ok(r)
}

/// Root of a real polynomial in `[lo, hi]` by bisection followed by Newton polish.
pub fn real_root_in_interval(p: &RealPoly, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let root = bracketed_root(|x| p.eval(x), lo, hi, tol)?;
    // Newton polish, keeping the iterate inside the final bracket
    let mut x = root;
    for _ in 0..4 {
        let (v, d) = p.eval_with_derivative(x);
        if d == 0.0 || !v.is_finite() {
            break;
        }
        let next = x - v / d;
        if (next - x).abs() > tol || !next.is_finite() {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Bisection on an arbitrary continuous function; `f(lo)` and `f(hi)` must differ in sign.
pub fn bracketed_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::BracketInvalid {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
