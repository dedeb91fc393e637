//! Small dense complex linear-algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Cholesky factorization of a Hermitian positive-definite matrix:
/// returns lower-triangular L with M = L L^H, or `None` when a pivot is not
/// strictly positive (the complex-field factorization in nalgebra would take
/// complex square roots of negative pivots instead of failing).
pub fn hermitian_cholesky(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut l = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        let mut diag = m[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let pivot = diag.sqrt();
        l[(j, j)] = Complex64::new(pivot, 0.0);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / pivot;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn invert_lower_triangular(l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = l.nrows();
    let mut inv = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for col in 0..n {
        for row in col..n {
            if row == col {
                inv[(row, col)] = Complex64::new(1.0, 0.0) / l[(row, row)];
            } else {
                let mut s = Complex64::new(0.0, 0.0);
                for k in col..row {
                    s += l[(row, k)] * inv[(k, col)];
                }
                inv[(row, col)] = -s / l[(row, row)];
            }
        }
    }
    inv
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_accepts_pd_rejects_indefinite() {
        let pd = DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(1.0, 0.0)],
        );
        let l = hermitian_cholesky(&pd).unwrap();
        let rec = &l * l.adjoint();
        assert!(max_abs(&(&rec - &pd)) < 1e-14);

        let neg = DMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)]);
        assert!(hermitian_cholesky(&neg).is_none());

        let indef = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        );
        assert!(hermitian_cholesky(&indef).is_none());
    }

    #[test]
    fn lower_triangular_inverse() {
        let l = DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 0.0), c(1.0, -1.0), c(3.0, 0.0)],
        );
        let inv = invert_lower_triangular(&l);
        let prod = &l * &inv;
        assert!(max_abs(&(&prod - &DMatrix::identity(2, 2))) < 1e-15);
    }
}
