//! Small dense linear-algebra helpers used by the closed-form solvers.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Cholesky factorization of a symmetric positive-definite matrix, in place.
/// Returns the lower-triangular factor. Fails if a pivot is not strictly positive.
pub(crate) fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky expects a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(Error::Numerical(format!(
                "matrix not positive definite at pivot {j} (value {diag:.3e})"
            )));
        }
        let d = diag.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
pub(crate) fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let l = cholesky(a)?;
    let n = l.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: matrix is {n}x{n} but rhs has length {}",
            b.len()
        )));
    }
    // forward substitution L y = b
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[(i, k)] * y[k];
        }
        y[i] = v / l[(i, i)];
    }
    // back substitution L^T x = y
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l[(k, i)] * x[k];
        }
        x[i] = v / l[(i, i)];
    }
    Ok(x)
}

/// Dot product of two slices, four-way unrolled so the sum is not serialized
/// on the add latency.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let chunks = n / 4 * 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let mut i = 0;
    while i < chunks {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        i += 4;
    }
    let mut s = (s0 + s1) + (s2 + s3);
    while i < n {
        s += a[i] * b[i];
        i += 1;
    }
    s
}

/// `v += c * u`, the coordinate-descent residual update.
#[inline]
pub(crate) fn axpy(c: f64, u: &[f64], v: &mut [f64]) {
    debug_assert_eq!(u.len(), v.len());
    for i in 0..u.len() {
        v[i] += c * u[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn spd_solve_matches_hand_computation() {
        let a = array![[4.0, 2.0], [2.0, 3.0]];
        let b = array![2.0, 5.0];
        let x = solve_spd(&a, &b).unwrap();
        // inverse of [[4,2],[2,3]] is [[3,-2],[-2,4]]/8
        assert!((x[0] - (3.0 * 2.0 - 2.0 * 5.0) / 8.0).abs() < 1e-12);
        assert!((x[1] - (-2.0 * 2.0 + 4.0 * 5.0) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky(&a).is_err());
    }
}
