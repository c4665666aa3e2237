//! Sylvester matrices and numeric resultants.

use crate::error::{Error, Result};
use crate::poly::{CplxPoly, C64};

/// Square Sylvester matrix of size `deg f + deg g`, rows in descending-degree order.
pub fn sylvester_matrix(f: &CplxPoly, g: &CplxPoly) -> Vec<Vec<C64>> {
    let (m, n) = (f.degree(), g.degree());
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..n {
        let mut row = vec![C64::new(0.0, 0.0); size];
        for (k, &c) in f.coeffs().iter().rev().enumerate() {
            row[shift + k] = c;
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![C64::new(0.0, 0.0); size];
        for (k, &c) in g.coeffs().iter().rev().enumerate() {
            row[shift + k] = c;
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<C64>>) -> C64 {
    let n = a.len();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("nonempty range");
        if a[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[row][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
        }
    }
    det
}

/// Resultant of `f` and `g`; vanishes exactly when they share a root.
pub fn sylvester_resultant(f: &CplxPoly, g: &CplxPoly) -> Result<C64> {
    if f.leading().norm() == 0.0 || g.leading().norm() == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    if f.degree() + g.degree() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(determinant(sylvester_matrix(f, g)))
}

/// Hadamard bound on `|det S|`, the scale for "relatively zero" resultants.
pub fn hadamard_scale(f: &CplxPoly, g: &CplxPoly) -> f64 {
    sylvester_matrix(f, g)
        .iter()
        .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// `|Res(f, g)|` divided by the Hadamard bound.
pub fn relative_resultant(f: &CplxPoly, g: &CplxPoly) -> Result<f64> {
    let r = sylvester_resultant(f, g)?;
    Ok(r.norm() / hadamard_scale(f, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(root: f64) -> CplxPoly {
        CplxPoly::from_real(&[-root, 1.0]).unwrap()
    }

    #[test]
    fn common_root_gives_zero() {
        assert_eq!(sylvester_resultant(&lin(1.0), &lin(1.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn distinct_linear_factors() {
        let r = sylvester_resultant(&lin(1.0), &lin(-1.0)).unwrap();
        assert!((r - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_of_root_differences() {
        // Res(f, g) = prod (a_i - b_j) for monic f, g
        let a = [C64::new(0.5, 1.0), C64::new(-1.0, 0.2)];
        let b = [C64::new(2.0, -0.3), C64::new(0.0, 0.7), C64::new(-0.4, -0.4)];
        let f = CplxPoly::from_roots(C64::new(1.0, 0.0), &a).unwrap();
        let g = CplxPoly::from_roots(C64::new(1.0, 0.0), &b).unwrap();
        let expected: C64 = a.iter().flat_map(|&x| b.iter().map(move |&y| x - y)).product();
        let r = sylvester_resultant(&f, &g).unwrap();
        assert!((r - expected).norm() < 1e-12 * expected.norm());
    }
}
