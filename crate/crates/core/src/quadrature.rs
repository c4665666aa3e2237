//! Double-precision Gauss–Legendre rules and endpoint-graded maps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_rule(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    GaussRule { nodes, weights }
}

/// Cached `n`-point rule.
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static GaussRule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(build_rule(n))))
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(lo + 0.5 * h * (x + 1.0));
        }
        total += 0.5 * h * s;
    }
    total
}

/// Adaptive Gauss–Legendre: a panel is accepted when its 8-point value agrees
/// with the sum over its two halves to `tol * (panel width)`, to `tol / 1000`
/// absolutely, or to roundoff. Integrable
/// endpoint singularities are handled by repeated bisection.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_DEPTH: u32 = 40;
    // hard cap on subdivisions; beyond it remaining panels are accepted as is
    const MAX_PANELS: usize = 20_000;
    let rule = gauss_legendre(8);
    let panel = |lo: f64, hi: f64, f: &mut F| {
        let h = hi - lo;
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(lo + 0.5 * h * (x + 1.0));
        }
        0.5 * h * s
    };
    let width = (b - a).abs();
    if width == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let whole = panel(a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut processed = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        processed += 1;
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid, &mut f);
        let right = panel(mid, hi, &mut f);
        let fine = left + right;
        let diff = (fine - coarse).abs();
        // stop at the roundoff floor of the panel as well as at the target
        if diff <= tol * (hi - lo).abs() / width
            || diff <= 1e-3 * tol
            || diff <= 1e-13 * (left.abs() + right.abs()) || depth >= MAX_DEPTH
            || processed >= MAX_PANELS
            || !diff.is_finite()
        {
            total += fine;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    total
}

/// Map `[0,1] -> [0,1]` behaving like `u^p` at 0 and `1 - (1-u)^q` at 1.
///
/// Used to absorb algebraic endpoint singularities: if the integrand behaves
/// like `t^(k/p)` near `t = 0`, it becomes smooth in `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointGrading {
    pub p: u32,
    pub q: u32,
}

impl EndpointGrading {
    pub fn new(p: u32, q: u32) -> Self {
        Self { p, q }
    }

    /// `(t, dt/du)`.
    pub fn map(&self, u: f64) -> (f64, f64) {
        let (p, q) = (self.p as i32, self.q as i32);
        let a = u.powi(p);
        let b = (1.0 - u).powi(q);
        let s = a + b;
        let t = a / s;
        let da = if p == 0 { 0.0 } else { p as f64 * u.powi(p - 1) };
        let db = if q == 0 { 0.0 } else { -(q as f64) * (1.0 - u).powi(q - 1) };
        let dt = (da * b - a * db) / (s * s);
        (t, dt)
    }

    /// `(t, 1 - t, dt/du)` with `1 - t` free of cancellation near `u = 1`.
    pub fn map_split(&self, u: f64) -> (f64, f64, f64) {
        let (t, dt) = self.map(u);
        let a = u.powi(self.p as i32);
        let b = (1.0 - u).powi(self.q as i32);
        (t, b / (a + b), dt)
    }

    /// Inverse map by bisection (the map is increasing).
    pub fn inverse(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.map(mid).0 < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
